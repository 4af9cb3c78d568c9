#pragma once

// Named verification cases. Each one recomputes an identity from scratch with
// exact arithmetic and compares the outcome with its expected verdict; the
// expected verdict is "holds" except for the cases that pin a known defect.

#include <functional>
#include <string>
#include <vector>

#include "folcal/report.hpp"

namespace folcal::cases {

struct CaseContext {
  int workers = 1;
};

struct CaseOutcome {
  bool pass = false;   ///< outcome matched the expected verdict
  bool exact = false;  ///< the identity held exactly (or the defect was reproduced)
  report::json details;
};

struct VerificationCase {
  std::string id;
  std::string description;
  std::string anchor;    ///< quoted claim the case exercises
  std::string expected;  ///< "holds", "fails" or "reported"
  bool slow = false;
  std::function<CaseOutcome(const CaseContext&)> run;
};

const std::vector<VerificationCase>& registry();
/// nullptr for unknown ids.
const VerificationCase* find(const std::string& id);

/// Runs one case and returns its verdict record
/// {case, description, anchor, expected, pass, exact, ..., elapsed_ms}.
report::json run_case(const VerificationCase& c, const CaseContext& ctx);

enum class TableCase { Full, Pairs, Zero };

struct TablePrediction {
  TableCase kind = TableCase::Zero;
  ScalarPi value;
};

/// Case analysis for e(Omega*) on E_{i1 k1} ^ .. ^ E_{i4 k4} over (4,8):
/// 3/2 pi^-2 times the sign of the k-permutation when all i agree, 1/2 pi^-2
/// times that sign when the i form two pairs and {k} is {5,6,7,8} split as
/// (i,i,j,j), 0 otherwise. Rows must come sorted by (i, k).
TablePrediction predict_euler_v_entry(const std::vector<int>& rows, const std::vector<int>& cols);

struct TableCheck {
  std::size_t tuples = 0;
  std::size_t full = 0;
  std::size_t pairs = 0;
  std::size_t zero = 0;
  std::size_t mismatches = 0;
};

/// All C(16,4) tuples of the (4,8) table against predict_euler_v_entry.
TableCheck check_euler_v_table();

}  // namespace folcal::cases
