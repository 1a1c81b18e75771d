// Copyright 2026 The popf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POPF_ERRORS_HPP_
#define POPF_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace popf {

/// Invalid or inconsistent scenario/controller/filter configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (e.g. singular innovation covariance).
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}

    double condition_estimate() const { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// Misuse of a channel protocol (e.g. two pushes in one step).
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation requested before the pipeline has enough history.
class WarmupError : public std::runtime_error {
public:
    explicit WarmupError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed config or trace file; message carries the line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    long line() const { return line_; }

private:
    long line_;
};

}  // namespace popf

#endif  // POPF_ERRORS_HPP_
