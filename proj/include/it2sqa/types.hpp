#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace it2sqa {

// Noisy is the "unacceptable" class and the positive class for metrics.
enum class ClassLabel { Noisy = 0, Clean = 1 };

enum class Split { Train = 0, Validation = 1, Test = 2 };

std::string_view to_string(ClassLabel label);
std::string_view to_string(Split split);
ClassLabel parse_label(std::string_view text);
Split parse_split(std::string_view text);

inline ClassLabel other(ClassLabel label) {
    return label == ClassLabel::Noisy ? ClassLabel::Clean : ClassLabel::Noisy;
}

// Bad user input: malformed files, out-of-range arguments, unsatisfiable requests.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Filesystem problems: missing inputs, unwritable outputs.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace it2sqa
