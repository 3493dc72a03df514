// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "chemagent/molecule.hpp"

namespace chemagent::molkit {

class SmilesError : public std::runtime_error {
public:
  SmilesError(const std::string &reason, std::size_t position)
      : std::runtime_error(reason + " at position " + std::to_string(position)),
        reason(reason),
        position(position) {}
  std::string reason;
  std::size_t position;
};

// OpenSMILES organic subset plus bracket atoms. Stereo marks are read and dropped.
Molecule parse_smiles(std::string_view text);

// Non-canonical SMILES that re-parses to an isomorphic graph.
std::string write_smiles(const Molecule &m);

// Hydrogens an unbracketed organic-subset atom would get for this bond sum,
// or -1 when the sum exceeds every default valence.
int default_implicit_h(const Element &e, bool aromatic, int bond_sum);

}  // namespace chemagent::molkit
