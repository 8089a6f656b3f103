#ifndef GPAL_MODEL_JSON_HPP
#define GPAL_MODEL_JSON_HPP

// JSON wire format for models:
//
//   {
//     "worlds": 2,
//     "relations": { "a": [[0, 1]], "b": [[0], [1]] },
//     "valuation": { "p": [0] }
//   }
//
// "worlds" is a count (ids 0..n-1); each relation is given as its partition
// into equivalence classes, which must cover every world exactly once.

#include <stdexcept>
#include <string>

#include "gpal/semantics.hpp"

namespace gpal {

class ModelJsonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string model_to_json(const KripkeModel& m);

// Throws ModelJsonError on malformed JSON or a schema violation.
KripkeModel model_from_json(const std::string& text);

}  // namespace gpal

#endif
