#pragma once

#include <map>
#include <string>
#include <vector>

#include "lexsub/augment.hpp"

namespace lexsub {

/// Multinomial naive Bayes over lowercased tokens with add-alpha smoothing.
class BagOfWordsClassifier {
 public:
  explicit BagOfWordsClassifier(double alpha = 1.0);

  void Train(const std::vector<SlotUtterance>& data);
  // Ties go to the lexicographically smallest intent.
  std::string Predict(const std::vector<std::string>& tokens) const;
  double Accuracy(const std::vector<SlotUtterance>& data) const;

 private:
  double alpha_;
  std::map<std::string, double> log_prior_;
  std::map<std::string, std::map<std::string, double>> counts_;
  std::map<std::string, double> totals_;
  std::size_t vocab_size_ = 0;
};

}  // namespace lexsub
