#ifndef GPAL_DERIVATION_HPP
#define GPAL_DERIVATION_HPP

// Derivation trees and the two directions of the translation bridge.
//
// lower_to_el rewrites a proof so that announcements disappear: reduction
// rules become the arrow/conjunction rules they were compressed from, and the
// composed-announcement rules vanish entirely (their premise translates to
// the same sequent as their conclusion).  Height never increases.
//
// lift_to_pal is the inverse direction: given a proof of the translation of a
// sequent, it re-introduces the announcement formulas one occurrence at a
// time, replacing arrow/conjunction inferences on translated announcement
// formulas with the matching reduction rules.  Each pass terminates because
// the rewritten occurrence strictly shrinks in complexity or the derivation
// strictly shrinks in height.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpal/calculus.hpp"
#include "gpal/sequent.hpp"

namespace gpal {

struct Derivation {
  RuleApplication justification;
  std::vector<Derivation> children;  // one per premise, in order

  const Sequent& root() const { return justification.conclusion; }
  // Structural equality over (rule, conclusion, eigenvariable, premises,
  // children).  The principal list is a derived annotation (the json format
  // does not carry it; import re-infers it) and is ignored.
  bool operator==(const Derivation& other) const;
};

// True iff every node is a literal schema instance whose children derive its
// premises in order, and every leaf is a genuine initial sequent.
bool check_derivation(const Derivation& d);

// Derivation of s that closes on a formula occurring on both sides: the
// usual identity expansion, decomposing x:phi in lock-step on the left and
// right until the initial sequents are atomic.  Every recursive step strictly
// decreases complexity(phi), including through the reduction rules.  Throws
// std::invalid_argument unless lab(x, phi) occurs in both sides of s.
Derivation identity_derivation(const Sequent& s, const Label& x,
                               const Formula& phi);

// Nodes on the longest branch; a leaf counts 1.
int height(const Derivation& d);

// translate applied member-wise; relational atoms are fixed points.
Sequent translate_sequent(const Sequent& s);
Multiset translate_multiset(const Multiset& m);

// Announcement-free derivation of the translated endsequent, height bounded
// by height(d).  Throws std::invalid_argument if d fails check_derivation.
Derivation lower_to_el(const Derivation& d);

// Derivation of `target` built from a derivation d of translate_sequent
// (target).  Throws std::invalid_argument if d fails check_derivation or
// derives the wrong sequent.
Derivation lift_to_pal(const Derivation& d, const Sequent& target);

enum class ExportFormat { Text, Latex, Json };

std::string export_derivation(const Derivation& d, ExportFormat format);

class ImportError : public std::runtime_error {
 public:
  ImportError(const std::string& message, std::string path)
      : std::runtime_error(message + " at " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Inverse of the json export; import(export(d, Json)) == d.  Accepts
// schema-conforming files whose inference steps are wrong (check_derivation
// sorts those out); throws ImportError on malformed input.
Derivation import_derivation(const std::string& text);

}  // namespace gpal

#endif
