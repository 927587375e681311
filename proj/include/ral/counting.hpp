#pragma once

#include "ral/formula.hpp"

#include <cstdint>
#include <string>

namespace ral {

/// Outcome of checking the counting premise "at most delta*2^N strings of
/// length N falsify R" by exhaustive enumeration.
struct CountingCertificate {
  std::string pred;
  unsigned length = 0;
  Rational delta;
  std::uint64_t falsifiers = 0;  ///< exact count k
  bool certified = false;        ///< k <= delta * 2^N

  Formula statement() const { return Formula::count_at_most(pred, length, delta); }
};

inline CountingCertificate counting_certificate(const std::string& pred, unsigned length, const Rational& delta,
                                                const Interpretation& m, unsigned enumeration_bound = 20) {
  if (length > enumeration_bound)
    throw BudgetError("counting certificate needs 2^" + std::to_string(length) + " evaluations, bound is 2^" +
                      std::to_string(enumeration_bound));
  const auto& p = m.predicate(pred);
  if (p.length != length) throw Error("arity mismatch for '" + pred + "'");
  CountingCertificate c{pred, length, delta, count_falsifiers(p, length), false};
  c.certified = Rational(c.falsifiers) <= delta * Rational(pow2(length));
  return c;
}

}  // namespace ral
