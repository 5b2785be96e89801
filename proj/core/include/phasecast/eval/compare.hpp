#ifndef PHASECAST_EVAL_COMPARE_HPP_
#define PHASECAST_EVAL_COMPARE_HPP_

#include <map>
#include <string>
#include <vector>

#include "phasecast/eval/report.hpp"

namespace phasecast::eval {

struct MismatchedTestSetsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelComparison {
  std::vector<std::string> losses;                       // stable order
  std::vector<std::vector<std::string>> bucket_ranking;  // per bucket, best first
  std::vector<std::string> overall_ranking;              // by total absolute error
  std::string short_horizon_winner;                      // lowest MAE in [0,20)
  std::string long_horizon_winner;                       // lowest MAE in [180,200]

  std::string to_table(const std::map<std::string, HorizonReport>& reports) const;
};

/// Rank the models per bucket and overall. All reports must cover the
/// identical test set (fingerprint-checked).
ModelComparison compare_models(const std::map<std::string, HorizonReport>& reports);

}  // namespace phasecast::eval

#endif  // PHASECAST_EVAL_COMPARE_HPP_
