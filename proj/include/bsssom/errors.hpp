#pragma once

#include <stdexcept>
#include <string>

namespace bsssom {

// Malformed or inconsistent input data (files, vectors of the wrong size).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A map file written by an incompatible format version.
class VersionError : public InputError {
public:
    using InputError::InputError;
};

// A hyperparameter or option outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An operation invoked on an object in the wrong state (e.g. predicting with an empty map).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace bsssom
