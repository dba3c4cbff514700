#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace shifts {

/// Invalid arguments, shapes, domains, or configuration.
class ValueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem and format failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string shape_str(const std::vector<int>& s) {
    std::string out = "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

}  // namespace shifts
