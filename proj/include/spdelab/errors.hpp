#pragma once

#include <stdexcept>
#include <string>

namespace spdelab {

/// Thrown when a time stepper produces a non-finite state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::string solver, int step)
        : std::runtime_error(solver + " diverged at step " + std::to_string(step)),
          solver_(std::move(solver)),
          step_(step) {}

    const std::string& solver() const noexcept { return solver_; }
    int step() const noexcept { return step_; }

private:
    std::string solver_;
    int step_;
};

/// Configuration parse/validation failure; carries the offending field name.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& detail)
        : std::runtime_error("config field '" + field + "': " + detail),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace spdelab
