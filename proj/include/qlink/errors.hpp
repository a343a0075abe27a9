#pragma once

#include <stdexcept>
#include <string>

namespace qlink {

// Configuration problems map to CLI exit code 1, model-domain problems to 2.
enum class ErrorKind {
    Config,
    NotFound,
    Domain,
    DivisionDomain,
    ModelDomain,
    NoOptimum,
    Unattainable,
    DegenerateInput,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // True for errors caused by the user's input rather than by the model.
    bool is_config_error() const noexcept {
        return kind_ == ErrorKind::Config || kind_ == ErrorKind::NotFound ||
               kind_ == ErrorKind::Io;
    }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message)
        : Error(ErrorKind::Config, message) {}
};

}  // namespace qlink
