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

#include "domainharvester/error.hpp"

namespace dh {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidHostname: return "InvalidHostname";
    case Errc::NoRegistrableDomain: return "NoRegistrableDomain";
    case Errc::IPAddressEntry: return "IPAddressEntry";
    case Errc::InvalidSeedList: return "InvalidSeedList";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ResolverUnavailable: return "ResolverUnavailable";
    case Errc::DuplicateIteration: return "DuplicateIteration";
    case Errc::CoverageMismatch: return "CoverageMismatch";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::ImmutableSnapshot: return "ImmutableSnapshot";
    case Errc::StoreLocked: return "StoreLocked";
    case Errc::IoError: return "IoError";
    case Errc::CorruptArtifact: return "CorruptArtifact";
    case Errc::EmbedderFailure: return "EmbedderFailure";
    case Errc::SnapshotMismatch: return "SnapshotMismatch";
    case Errc::InsufficientUnknowns: return "InsufficientUnknowns";
    case Errc::InsufficientTrainingData: return "InsufficientTrainingData";
    case Errc::DegenerateTraining: return "DegenerateTraining";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::UnsupportedBase: return "UnsupportedBase";
    case Errc::MissingPrior: return "MissingPrior";
    case Errc::UnparseableFile: return "UnparseableFile";
    case Errc::MissingArtifact: return "MissingArtifact";
    case Errc::PortUnavailable: return "PortUnavailable";
    case Errc::InvalidWorldScript: return "InvalidWorldScript";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace dh
