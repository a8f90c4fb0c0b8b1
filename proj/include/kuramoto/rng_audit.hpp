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


#ifndef KURAMOTO_RNG_AUDIT_HPP_
#define KURAMOTO_RNG_AUDIT_HPP_

#include <cstdint>
#include <vector>

namespace kuramoto::rng_audit {

/*
 * Debug-build check that every random generator is seeded from a declared
 * seed. Library code calls note(seed) wherever it constructs a generator;
 * while a Scope is active on the calling thread, seeds outside its allowed
 * set are recorded as violations. In release builds note() compiles away
 * and scopes never see a violation.
 */
#ifdef NDEBUG
inline constexpr bool kEnabled = false;
inline void note(std::uint64_t) {}
#else
inline constexpr bool kEnabled = true;
void note(std::uint64_t seed);
#endif

class Scope {
public:
  explicit Scope(std::vector<std::uint64_t> allowed);
  ~Scope();
  Scope(const Scope &) = delete;
  Scope &operator=(const Scope &) = delete;

  const std::vector<std::uint64_t> &violations() const { return violations_; }

private:
  friend void note(std::uint64_t seed);
  std::vector<std::uint64_t> allowed_;
  std::vector<std::uint64_t> violations_;
  Scope *outer_;
};

} // namespace kuramoto::rng_audit

#endif // KURAMOTO_RNG_AUDIT_HPP_
