#include "lexsub/augment.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lexsub {

void Validate(const SlotUtterance& utt) {
  std::size_t prev_end = 0;
  for (const auto& s : utt.slots) {
    if (s.start >= s.end || s.end > utt.tokens.size() || s.start < prev_end) {
      throw LexsubError(ErrorCode::kInvalidArgument,
                        "bad slot span [" + std::to_string(s.start) + ", " +
                            std::to_string(s.end) + ") in " + utt.id);
    }
    prev_end = s.end;
  }
}

DerivedRng::DerivedRng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

DerivedRng::DerivedRng(std::uint64_t seed, std::uint64_t index,
                       std::uint64_t copy)
    : seed_(seed) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(index), hi(index), lo(copy), hi(copy)};
  engine_.seed(seq);
}

double DerivedRng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t DerivedRng::Below(std::size_t n) {
  if (n == 0) throw LexsubError(ErrorCode::kInvalidArgument, "empty range");
  const auto k = static_cast<std::size_t>(Uniform() * static_cast<double>(n));
  return std::min(k, n - 1);
}

std::string SampleSubstitute(const SubstituteDistribution& dist,
                             DerivedRng& rng) {
  if (dist.empty()) {
    throw LexsubError(ErrorCode::kEmptyDistribution, "nothing to sample");
  }
  const auto ranked = rank(dist, dist.size());
  const double u = rng.Uniform() * dist.total();
  double cumulative = 0.0;
  for (const auto& [w, p] : ranked) {
    cumulative += p;
    if (u < cumulative) return w;
  }
  // Rounding left u past the last boundary.
  for (auto it = ranked.rbegin(); it != ranked.rend(); ++it) {
    if (it->second > 0.0) return it->first;
  }
  return ranked.back().first;
}

LexSubInstance SlotInstance(const SlotUtterance& utt, std::size_t index,
                            Pos pos) {
  LexSubInstance inst;
  inst.id = utt.id + "#" + std::to_string(index);
  inst.tokens = utt.tokens;
  inst.target_index = index;
  inst.pos = pos;
  inst.lemma = DefaultLemmatizer()->Lemmatize(ToLower(utt.tokens.at(index)), pos);
  Validate(inst);
  return inst;
}

namespace {

std::vector<std::size_t> SlotTokenIndices(const SlotUtterance& utt) {
  std::vector<std::size_t> out;
  for (const auto& s : utt.slots) {
    for (std::size_t i = s.start; i < s.end; ++i) out.push_back(i);
  }
  return out;
}

SubstituteDistribution SamplingDistribution(const SubstituteDistribution& raw,
                                            const LexSubInstance& inst,
                                            const AugmentConfig& config) {
  SubstituteDistribution processed;
  try {
    processed = postprocess(raw, inst, config.postproc);
  } catch (const LexsubError& e) {
    if (e.code() != ErrorCode::kEmptyAfterFiltering) throw;
    throw LexsubError(ErrorCode::kEmptyDistribution,
                      "no substitutes left for " + inst.id);
  }
  if (!config.alphabetic_only) return processed;
  std::vector<WordProb> kept;
  for (const auto& [w, p] : processed) {
    if (p > 0.0 && IsAlphabeticWord(w)) kept.emplace_back(w, p);
  }
  if (kept.empty()) {
    throw LexsubError(ErrorCode::kEmptyDistribution,
                      "no single-word substitutes for " + inst.id);
  }
  return normalize(std::move(kept));
}

}  // namespace

SlotUtterance augment_one(const SlotUtterance& utt, const Model& model,
                          const AugmentConfig& config, DerivedRng& rng) {
  Validate(utt);
  const auto candidates = SlotTokenIndices(utt);
  if (candidates.empty()) {
    throw LexsubError(ErrorCode::kNoSlotTokens, utt.id + " has no slot tokens");
  }
  const std::size_t index = candidates[rng.Below(candidates.size())];
  const auto inst = SlotInstance(utt, index, config.slot_pos);
  const auto dist = SamplingDistribution(model.generate(inst), inst, config);
  SlotUtterance out = utt;
  out.tokens[index] = SampleSubstitute(dist, rng);
  out.provenance =
      AugmentProvenance{utt.id, index, utt.tokens[index], out.tokens[index],
                        rng.seed()};
  return out;
}

SlotUtterance augment_one(const SlotUtterance& utt, const Model& model,
                          const AugmentConfig& config, std::uint64_t seed) {
  DerivedRng rng(seed);
  return augment_one(utt, model, config, rng);
}

AugmentResult augment_dataset(const std::vector<SlotUtterance>& dataset,
                              const Model& model, std::size_t multiplier,
                              std::uint64_t seed, const AugmentConfig& config,
                              Execution exec) {
  AugmentResult result;
  result.dataset = dataset;
  const std::size_t tasks = dataset.size() * multiplier;
  std::vector<std::optional<SlotUtterance>> made(tasks);
  const Execution run = model.reentrant ? exec : Execution::kSerial;
  ForEachIndex(tasks, run, [&](std::size_t t) {
    const std::size_t i = t / multiplier;
    const std::size_t c = t % multiplier;
    DerivedRng rng(seed, i, c);
    try {
      auto out = augment_one(dataset[i], model, config, rng);
      out.id = dataset[i].id + "-aug" + std::to_string(c);
      made[t] = std::move(out);
    } catch (const LexsubError& e) {
      if (e.code() != ErrorCode::kNoSlotTokens &&
          e.code() != ErrorCode::kEmptyDistribution) {
        throw;
      }
    }
  });
  for (auto& m : made) {
    if (m) {
      result.dataset.push_back(std::move(*m));
      ++result.generated;
    } else {
      ++result.skipped;
    }
  }
  return result;
}

std::vector<SlotUtterance> subsample_train(
    const std::vector<SlotUtterance>& dataset, double fraction,
    std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "fraction must be in (0, 1], got " + std::to_string(fraction));
  }
  if (fraction == 1.0) return dataset;
  std::map<std::string, std::vector<std::size_t>> by_intent;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_intent[dataset[i].intent].push_back(i);
  }
  DerivedRng rng(seed);
  std::vector<std::size_t> chosen;
  for (auto& [intent, indices] : by_intent) {
    // Fisher-Yates with the portable generator.
    for (std::size_t i = indices.size(); i > 1; --i) {
      std::swap(indices[i - 1], indices[rng.Below(i)]);
    }
    const auto take = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(indices.size())));
    chosen.insert(chosen.end(), indices.begin(),
                  indices.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<SlotUtterance> out;
  out.reserve(chosen.size());
  for (auto i : chosen) out.push_back(dataset[i]);
  return out;
}

namespace {

SlotUtterance ParseSnipsUtterance(const Json& j, const std::string& intent,
                                  std::size_t ordinal) {
  SlotUtterance utt;
  utt.intent = intent;
  utt.id = j.contains("id") ? j["id"].get<std::string>()
                            : intent + "-" + std::to_string(ordinal);
  for (const auto& chunk : j.at("data")) {
    const auto words = SplitWhitespace(chunk.at("text").get<std::string>());
    const std::size_t start = utt.tokens.size();
    utt.tokens.insert(utt.tokens.end(), words.begin(), words.end());
    if (chunk.contains("entity") && !words.empty()) {
      utt.slots.push_back({start, utt.tokens.size(),
                           chunk["entity"].get<std::string>()});
    }
  }
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    utt.provenance = AugmentProvenance{
        p.at("source_id").get<std::string>(),
        p.at("replaced_index").get<std::size_t>(),
        p.at("original").get<std::string>(),
        p.at("substitute").get<std::string>(), p.at("seed").get<std::uint64_t>()};
  }
  Validate(utt);
  return utt;
}

Json Chunk(const std::vector<std::string>& tokens, std::size_t begin,
           std::size_t end, bool trailing_space) {
  std::string text;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) text += ' ';
    text += tokens[i];
  }
  if (trailing_space) text += ' ';
  return Json{{"text", text}};
}

}  // namespace

std::vector<SlotUtterance> ReadSnipsJson(const Json& j) {
  if (!j.is_object()) {
    throw LexsubError(ErrorCode::kParseError, "SNIPS data must be an object");
  }
  std::vector<SlotUtterance> out;
  for (const auto& [intent, rows] : j.items()) {
    std::size_t ordinal = 0;
    for (const auto& row : rows) {
      try {
        out.push_back(ParseSnipsUtterance(row, intent, ordinal++));
      } catch (const Json::exception& e) {
        throw LexsubError(ErrorCode::kParseError,
                          intent + "[" + std::to_string(ordinal - 1) + "]: " + e.what());
      }
    }
  }
  return out;
}

std::vector<SlotUtterance> ReadSnips(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return ReadSnipsJson(ReadJsonFile(path));
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SlotUtterance> out;
  for (const auto& f : files) {
    auto part = ReadSnipsJson(ReadJsonFile(f));
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

Json SnipsToJson(const std::vector<SlotUtterance>& dataset) {
  Json out = Json::object();
  for (const auto& utt : dataset) {
    Json data = Json::array();
    std::size_t pos = 0;
    for (const auto& s : utt.slots) {
      if (pos < s.start) data.push_back(Chunk(utt.tokens, pos, s.start, true));
      Json chunk = Chunk(utt.tokens, s.start, s.end, s.end < utt.tokens.size());
      chunk["entity"] = s.label;
      data.push_back(std::move(chunk));
      pos = s.end;
    }
    if (pos < utt.tokens.size()) {
      data.push_back(Chunk(utt.tokens, pos, utt.tokens.size(), false));
    }
    Json row{{"id", utt.id}, {"data", std::move(data)}};
    if (utt.provenance) {
      const auto& p = *utt.provenance;
      row["provenance"] = {{"source_id", p.source_id},
                           {"replaced_index", p.replaced_index},
                           {"original", p.original},
                           {"substitute", p.substitute},
                           {"seed", p.seed}};
    }
    out[utt.intent].push_back(std::move(row));
  }
  return out;
}

}  // namespace lexsub
