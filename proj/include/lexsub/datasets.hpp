#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lexsub/core.hpp"

namespace lexsub {

// SemEval-2007 gold: "lemma.pos id :: sub1 w1;sub2 w2;". Multiword
// substitutes are dropped and instances left without gold are omitted. The
// context is a one-token placeholder (the lemma) until
// AttachSemevalContexts fills it in.
std::vector<LexSubInstance> load_semeval_gold(std::istream& in);
std::vector<LexSubInstance> load_semeval_gold(const std::filesystem::path& path);

// Fills tokens/target_index from the SemEval task XML
// (<lexelt item=..><instance id=..><context>.. <head>w</head> ..</context>).
// Instances without a context in the XML are dropped.
std::vector<LexSubInstance> AttachSemevalContexts(
    std::vector<LexSubInstance> instances, std::istream& xml);
std::vector<LexSubInstance> AttachSemevalContexts(
    std::vector<LexSubInstance> instances, const std::filesystem::path& xml);

enum class CoincoSplit { kAll, kFirst35, kLast65 };
CoincoSplit ParseCoincoSplit(std::string_view text);

// CoInCo XML -> canonical instances. Targets flagged problematic or with a
// POS outside noun/verb/adj/adv are skipped, as are instances without
// single-word gold. The split is taken over sentence order.
std::vector<LexSubInstance> ConvertCoinco(std::istream& xml, CoincoSplit split);
std::vector<LexSubInstance> ConvertCoinco(const std::filesystem::path& xml,
                                          CoincoSplit split);

// Penn or TreeTagger tag -> POS (NN*, VB*/VV*/VH*, JJ*, RB*); throws
// kUnknownPos otherwise.
Pos PosFromPennTag(std::string_view tag);

}  // namespace lexsub
