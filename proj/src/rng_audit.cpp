// Copyright 2026 The kuramoto-graphs Authors
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


#include "kuramoto/rng_audit.hpp"

#include <algorithm>

namespace kuramoto::rng_audit {
namespace {

thread_local Scope *current = nullptr;

} // namespace

Scope::Scope(std::vector<std::uint64_t> allowed) : allowed_(std::move(allowed)), outer_(current) {
  current = this;
}

Scope::~Scope() { current = outer_; }

#ifndef NDEBUG
void note(std::uint64_t seed) {
  Scope *scope = current;
  if (scope && std::find(scope->allowed_.begin(), scope->allowed_.end(), seed) == scope->allowed_.end()) {
    scope->violations_.push_back(seed);
  }
}
#endif

} // namespace kuramoto::rng_audit
