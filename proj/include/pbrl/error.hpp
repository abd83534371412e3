// Copyright 2026 The pbrl Authors. All rights reserved.
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

#ifndef PBRL_ERROR_HPP_
#define PBRL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pbrl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Exact enumeration of trajectories would exceed the configured cap.
class EnumerationCapExceeded : public Error {
 public:
  using Error::Error;
};

// Policy-level preference cannot be evaluated exactly; callers fall back to
// a sampled estimate.
class MonteCarloRequired : public EnumerationCapExceeded {
 public:
  using EnumerationCapExceeded::EnumerationCapExceeded;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class NoCondorcetWinner : public Error {
 public:
  using Error::Error;
};

class EmptyPolicySet : public Error {
 public:
  using Error::Error;
};

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

class DomainTooLarge : public Error {
 public:
  using Error::Error;
};

class VertexEnumerationCapExceeded : public Error {
 public:
  using Error::Error;
};

class SingularGram : public Error {
 public:
  using Error::Error;
};

}  // namespace pbrl

#endif  // PBRL_ERROR_HPP_
