#include "lexsub/classifier.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace lexsub {

BagOfWordsClassifier::BagOfWordsClassifier(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0)) {
    throw LexsubError(ErrorCode::kInvalidArgument, "alpha must be positive");
  }
}

void BagOfWordsClassifier::Train(const std::vector<SlotUtterance>& data) {
  if (data.empty()) {
    throw LexsubError(ErrorCode::kInvalidArgument, "empty training set");
  }
  log_prior_.clear();
  counts_.clear();
  totals_.clear();
  std::set<std::string> vocab;
  std::map<std::string, double> docs;
  for (const auto& utt : data) {
    docs[utt.intent] += 1.0;
    auto& counts = counts_[utt.intent];
    for (const auto& tok : utt.tokens) {
      const auto w = ToLower(tok);
      counts[w] += 1.0;
      totals_[utt.intent] += 1.0;
      vocab.insert(w);
    }
  }
  vocab_size_ = vocab.size();
  for (const auto& [intent, n] : docs) {
    log_prior_[intent] = std::log(n / static_cast<double>(data.size()));
  }
}

std::string BagOfWordsClassifier::Predict(
    const std::vector<std::string>& tokens) const {
  if (log_prior_.empty()) {
    throw LexsubError(ErrorCode::kInvalidArgument, "classifier is not trained");
  }
  std::string best;
  double best_score = -std::numeric_limits<double>::infinity();
  const double v = static_cast<double>(vocab_size_ + 1);
  for (const auto& [intent, prior] : log_prior_) {
    const auto& counts = counts_.at(intent);
    const double denom = std::log(totals_.at(intent) + alpha_ * v);
    double score = prior;
    for (const auto& tok : tokens) {
      auto it = counts.find(ToLower(tok));
      const double c = it == counts.end() ? 0.0 : it->second;
      score += std::log(c + alpha_) - denom;
    }
    if (score > best_score) {
      best_score = score;
      best = intent;
    }
  }
  return best;
}

double BagOfWordsClassifier::Accuracy(
    const std::vector<SlotUtterance>& data) const {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& utt : data) {
    if (Predict(utt.tokens) == utt.intent) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace lexsub
