// Copyright 2026 The evasim Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace evasim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class MissingVehicle : public Error {
 public:
  explicit MissingVehicle(int id)
      : Error("vehicle " + std::to_string(id) + " not present"), id_(id) {}
  int id() const { return id_; }

 private:
  int id_;
};

class NonFiniteLoss : public Error {
 public:
  using Error::Error;
};

class FrozenMismatch : public Error {
 public:
  using Error::Error;
};

class MismatchedScenes : public Error {
 public:
  using Error::Error;
};

class InsufficientHorizon : public Error {
 public:
  using Error::Error;
};

class EmptyBatch : public Error {
 public:
  using Error::Error;
};

}  // namespace evasim
