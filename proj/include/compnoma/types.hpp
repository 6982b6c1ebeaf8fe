#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace compnoma {

enum class CellId : std::uint32_t {};
enum class UserId : std::uint32_t {};

constexpr std::size_t index_of(CellId c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index_of(UserId u) { return static_cast<std::size_t>(u); }

std::string to_string(CellId c);
std::string to_string(UserId u);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Error taxonomy. Infeasible power allocations are not errors; they are
// reported through PowerAllocation::status.

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t line, std::string key)
        : ConfigError(what), line_(line), key_(std::move(key)) {}
    std::size_t line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

class ValidationError : public ConfigError {
public:
    ValidationError(std::string field, const std::string& reason)
        : ConfigError("invalid value for '" + field + "': " + reason), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a cluster list breaks one of the two joint-transmission decoding
// conditions: (1) CoMP users precede non-CoMP users, (2) CoMP users keep the
// same relative order in every cluster.
class ConditionViolation : public std::logic_error {
public:
    ConditionViolation(int which, CellId cell, std::vector<UserId> users, const std::string& what)
        : std::logic_error(what), which_(which), cell_(cell), users_(std::move(users)) {}
    int which() const { return which_; }
    CellId cell() const { return cell_; }
    const std::vector<UserId>& users() const { return users_; }

private:
    int which_;
    CellId cell_;
    std::vector<UserId> users_;
};

}  // namespace compnoma
