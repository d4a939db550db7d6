/*
 * Copyright 2026 The maculavae Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace maculavae {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A DiseaseModel (or a probability vector) violates its invariants.
class InvalidModelError : public Error {
public:
    using Error::Error;
};

/// A feature vector cannot be decoded back into a patient record.
class CodecError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// NaN or Inf where finite values are required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Tensor shapes that do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Request that cannot be satisfied, e.g. more clusters than points.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Record ids that do not join between two tables.
class JoinError : public Error {
public:
    using Error::Error;
};

/// Precondition on a function argument or configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace maculavae
