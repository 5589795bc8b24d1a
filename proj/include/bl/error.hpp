// Copyright 2026 The blearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BL_ERROR_HPP_
#define BL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace bl {

// Base of every error thrown by the library. The CLI maps ConfigError to
// exit status 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ModeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public NumericError {
 public:
  DivergenceError(std::size_t step, std::size_t chain)
      : NumericError("langevin chain " + std::to_string(chain) +
                     " diverged at step " + std::to_string(step)),
        step_(step),
        chain_(chain) {}

  std::size_t step() const { return step_; }
  std::size_t chain() const { return chain_; }

 private:
  std::size_t step_;
  std::size_t chain_;
};

}  // namespace bl

#endif  // BL_ERROR_HPP_
