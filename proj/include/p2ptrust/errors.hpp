#pragma once

#include <stdexcept>
#include <string>

namespace p2ptrust {

// Input outside the mathematical domain of an operation (zero denominators,
// probabilities outside (0,1], negative ratios).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A data invariant was broken by the caller, e.g. received > requested.
class InvariantError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// Estimate requested from a state that has seen no samples.
class NoSamplesError : public std::runtime_error {
public:
  NoSamplesError() : std::runtime_error("no samples") {}
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace p2ptrust
