// Copyright 2026 The DomainHarvester Authors
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
#include <string_view>

namespace dh {

enum class Errc {
  InvalidArgument,
  InvalidHostname,
  NoRegistrableDomain,
  IPAddressEntry,
  InvalidSeedList,
  ConfigError,
  ResolverUnavailable,
  DuplicateIteration,
  CoverageMismatch,
  InsufficientHistory,
  ImmutableSnapshot,
  StoreLocked,
  IoError,
  CorruptArtifact,
  EmbedderFailure,
  SnapshotMismatch,
  InsufficientUnknowns,
  InsufficientTrainingData,
  DegenerateTraining,
  SchemaMismatch,
  UnsupportedBase,
  MissingPrior,
  UnparseableFile,
  MissingArtifact,
  PortUnavailable,
  InvalidWorldScript,
};

std::string_view to_string(Errc code);

// Every failure the library reports carries one of the codes above; callers
// branch on code(), humans read what().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dh
