#include "lexsub/lemmatizer.hpp"

#include <array>
#include <fstream>
#include <unordered_set>
#include <utility>

#include "lexsub/io.hpp"

namespace lexsub {

namespace {

// ---------------------------------------------------------------------------
// Porter stemmer

class PorterWord {
 public:
  explicit PorterWord(std::string w) : w_(std::move(w)) {}

  std::string Run() {
    if (w_.size() <= 2) return w_;
    Step1a();
    Step1b();
    Step1c();
    Step2();
    Step3();
    Step4();
    Step5();
    return w_;
  }

 private:
  bool Cons(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !Cons(i - 1);
      default:
        return true;
    }
  }

  // m in [C](VC)^m[V] over w_[0, len).
  int Measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && Cons(i)) ++i;
    while (i < len) {
      while (i < len && !Cons(i)) ++i;
      if (i >= len) break;
      while (i < len && Cons(i)) ++i;
      ++m;
    }
    return m;
  }

  bool VowelIn(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!Cons(i)) return true;
    }
    return false;
  }

  bool DoubleCons(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && Cons(len - 1);
  }

  // consonant-vowel-consonant ending, last not w, x or y.
  bool Cvc(std::size_t len) const {
    if (len < 3 || !Cons(len - 1) || Cons(len - 2) || !Cons(len - 3)) {
      return false;
    }
    const char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool Ends(std::string_view s) const { return w_.ends_with(s); }
  std::size_t StemLen(std::string_view suffix) const {
    return w_.size() - suffix.size();
  }
  void Replace(std::string_view suffix, std::string_view with) {
    w_.resize(StemLen(suffix));
    w_.append(with);
  }

  // Replaces the first matching suffix when the stem measure exceeds
  // `min_m`; returns whether a suffix matched at all.
  bool ReplaceIfMeasure(
      std::initializer_list<std::pair<std::string_view, std::string_view>> rules,
      int min_m) {
    for (const auto& [suffix, with] : rules) {
      if (Ends(suffix)) {
        if (Measure(StemLen(suffix)) > min_m) Replace(suffix, with);
        return true;
      }
    }
    return false;
  }

  void Step1a() {
    if (Ends("sses")) Replace("sses", "ss");
    else if (Ends("ies")) Replace("ies", "i");
    else if (Ends("ss")) {}
    else if (Ends("s")) Replace("s", "");
  }

  void Step1b() {
    if (Ends("eed")) {
      if (Measure(StemLen("eed")) > 0) Replace("eed", "ee");
      return;
    }
    bool stripped = false;
    for (std::string_view suffix : {"ed", "ing"}) {
      if (Ends(suffix) && VowelIn(StemLen(suffix))) {
        Replace(suffix, "");
        stripped = true;
        break;
      }
    }
    if (!stripped) return;
    if (Ends("at")) Replace("at", "ate");
    else if (Ends("bl")) Replace("bl", "ble");
    else if (Ends("iz")) Replace("iz", "ize");
    else if (DoubleCons(w_.size())) {
      const char c = w_.back();
      if (c != 'l' && c != 's' && c != 'z') w_.pop_back();
    } else if (Measure(w_.size()) == 1 && Cvc(w_.size())) {
      w_.push_back('e');
    }
  }

  void Step1c() {
    if (Ends("y") && VowelIn(StemLen("y"))) w_.back() = 'i';
  }

  void Step2() {
    ReplaceIfMeasure({{"ational", "ate"}, {"tional", "tion"},
                      {"enci", "ence"}, {"anci", "ance"},
                      {"izer", "ize"}, {"abli", "able"},
                      {"alli", "al"}, {"entli", "ent"},
                      {"eli", "e"}, {"ousli", "ous"},
                      {"ization", "ize"}, {"ation", "ate"},
                      {"ator", "ate"}, {"alism", "al"},
                      {"iveness", "ive"}, {"fulness", "ful"},
                      {"ousness", "ous"}, {"aliti", "al"},
                      {"iviti", "ive"}, {"biliti", "ble"}},
                     0);
  }

  void Step3() {
    ReplaceIfMeasure({{"icate", "ic"}, {"ative", ""}, {"alize", "al"},
                      {"iciti", "ic"}, {"ical", "ic"}, {"ful", ""},
                      {"ness", ""}},
                     0);
  }

  void Step4() {
    static constexpr std::array<std::string_view, 19> kSuffixes = {
        "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent",
        "ism",   "ate",  "iti",  "ous",  "ive",  "ize",  "al",  "er",
        "ic",    "ou",   "ion"};
    for (std::string_view suffix : kSuffixes) {
      if (!Ends(suffix)) continue;
      const std::size_t len = StemLen(suffix);
      if (suffix == "ion" &&
          !(len > 0 && (w_[len - 1] == 's' || w_[len - 1] == 't'))) {
        return;
      }
      if (Measure(len) > 1) Replace(suffix, "");
      return;
    }
  }

  void Step5() {
    if (Ends("e")) {
      const std::size_t len = StemLen("e");
      const int m = Measure(len);
      if (m > 1 || (m == 1 && !Cvc(len))) w_.pop_back();
    }
    if (Ends("ll") && Measure(w_.size()) > 1) w_.pop_back();
  }

  std::string w_;
};

// ---------------------------------------------------------------------------
// Rule lemmatizer helpers

bool IsVowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// Undo consonant doubling and restore a silent e after -ed/-ing/-er/-est.
std::string RepairStem(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 3 && stem[n - 1] == stem[n - 2] && !IsVowel(stem[n - 1]) &&
      stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z' &&
      stem[n - 1] != 'f') {
    stem.pop_back();
    return stem;
  }
  if (stem.ends_with("at") || stem.ends_with("bl") || stem.ends_with("iz") ||
      stem.ends_with("us") || stem.ends_with("uir") || stem.ends_with("ir")) {
    return stem + "e";
  }
  // Short consonant-vowel-consonant stems: hop(e), mak(e), tak(e).
  if (n >= 2 && n <= 4) {
    const char last = stem[n - 1];
    const bool cvc = !IsVowel(last) && last != 'w' && last != 'x' &&
                     last != 'y' && IsVowel(stem[n - 2]) &&
                     (n == 2 || !IsVowel(stem[n - 3]));
    if (cvc) return stem + "e";
  }
  // Endings that cannot close an English word without a final e.
  static const std::array<std::string_view, 9> kNeedE = {
      "v", "dg", "ac", "rg", "nc", "rs", "ls", "ns", "uc"};
  for (auto ending : kNeedE) {
    if (stem.ends_with(ending)) return stem + "e";
  }
  return stem;
}

std::string NounLemma(const std::string& w) {
  const std::size_t n = w.size();
  if (n <= 3) return w;
  if (w.ends_with("ss") || w.ends_with("us") || w.ends_with("is") ||
      w.ends_with("ous")) {
    return w;
  }
  if (w.ends_with("ies") && n > 4) return w.substr(0, n - 3) + "y";
  for (std::string_view suffix : {"sses", "ches", "shes", "xes", "zzes"}) {
    if (w.ends_with(suffix)) return w.substr(0, n - 2);
  }
  if (w.ends_with("s")) return w.substr(0, n - 1);
  return w;
}

std::string VerbLemma(const std::string& w) {
  const std::size_t n = w.size();
  if (n <= 3) return w;
  if (w.ends_with("ies") && n > 4) return w.substr(0, n - 3) + "y";
  for (std::string_view suffix :
       {"sses", "ches", "shes", "xes", "zzes", "oes"}) {
    if (w.ends_with(suffix)) return w.substr(0, n - 2);
  }
  if (w.ends_with("ied") && n > 4) return w.substr(0, n - 3) + "y";
  if (w.ends_with("eed") && n <= 5) return w;  // need, feed, seed
  if (w.ends_with("ed") && n > 4) return RepairStem(w.substr(0, n - 2));
  if (w.ends_with("ing") && n > 5) return RepairStem(w.substr(0, n - 3));
  if (w.ends_with("ss") || w.ends_with("us") || w.ends_with("is")) return w;
  if (w.ends_with("s")) return w.substr(0, n - 1);
  return w;
}

std::string AdjLemma(const std::string& w) {
  const std::size_t n = w.size();
  if (w.ends_with("iest") && n > 5) return w.substr(0, n - 4) + "y";
  if (w.ends_with("ier") && n > 4) return w.substr(0, n - 3) + "y";
  if (w.ends_with("est") && n > 5) return RepairStem(w.substr(0, n - 3));
  if (w.ends_with("er") && n > 4) return RepairStem(w.substr(0, n - 2));
  return w;
}

}  // namespace

std::string PorterStem(std::string_view word) {
  return PorterWord(ToLower(word)).Run();
}

RuleLemmatizer::RuleLemmatizer() {
  noun_exceptions_ = {
      {"men", "man"},         {"women", "woman"},   {"children", "child"},
      {"feet", "foot"},       {"teeth", "tooth"},   {"geese", "goose"},
      {"mice", "mouse"},      {"lice", "louse"},    {"people", "person"},
      {"oxen", "ox"},         {"wives", "wife"},    {"knives", "knife"},
      {"lives", "life"},      {"leaves", "leaf"},   {"wolves", "wolf"},
      {"halves", "half"},     {"shelves", "shelf"}, {"thieves", "thief"},
      {"loaves", "loaf"},     {"calves", "calf"},   {"selves", "self"},
      {"criteria", "criterion"}, {"phenomena", "phenomenon"},
      {"data", "datum"},      {"media", "medium"},  {"analyses", "analysis"},
      {"crises", "crisis"},   {"theses", "thesis"}, {"indices", "index"},
      {"matrices", "matrix"}, {"heroes", "hero"},   {"potatoes", "potato"},
      {"tomatoes", "tomato"}, {"echoes", "echo"},   {"shoes", "shoe"},
      {"buses", "bus"},       {"gases", "gas"},     {"dice", "die"},
      {"cacti", "cactus"},    {"fungi", "fungus"},  {"alumni", "alumnus"},
      {"news", "news"},       {"series", "series"}, {"species", "species"},
      {"means", "means"},     {"physics", "physics"},
      {"politics", "politics"}, {"economics", "economics"},
      {"mathematics", "mathematics"}, {"glasses", "glass"},
      {"horses", "horse"},    {"houses", "house"},  {"causes", "cause"},
      {"cases", "case"},      {"bases", "base"},    {"purposes", "purpose"},
      {"courses", "course"},  {"nurses", "nurse"},  {"phases", "phase"},
      {"vases", "vase"},      {"uses", "use"},      {"clauses", "clause"},
      {"pauses", "pause"},    {"responses", "response"},
      {"expenses", "expense"}, {"licenses", "license"},
      {"senses", "sense"},    {"verses", "verse"},  {"noses", "nose"},
      {"roses", "rose"},      {"doses", "dose"},    {"cheeses", "cheese"},
      {"images", "image"},    {"ages", "age"},      {"pages", "page"},
      {"stages", "stage"},    {"changes", "change"}, {"prices", "price"},
      {"pieces", "piece"},    {"places", "place"},  {"faces", "face"},
      {"voices", "voice"},    {"services", "service"},
      {"choices", "choice"},  {"offices", "office"}, {"sources", "source"},
      {"forces", "force"},    {"races", "race"},    {"spaces", "space"},
      {"sentences", "sentence"}, {"differences", "difference"},
      {"boxes", "box"},       {"taxes", "tax"},     {"foxes", "fox"},
  };
  verb_exceptions_ = {
      {"am", "be"},        {"is", "be"},          {"are", "be"},
      {"was", "be"},       {"were", "be"},        {"been", "be"},
      {"being", "be"},     {"has", "have"},       {"had", "have"},
      {"having", "have"},  {"does", "do"},        {"did", "do"},
      {"done", "do"},      {"went", "go"},        {"gone", "go"},
      {"goes", "go"},      {"bought", "buy"},     {"brought", "bring"},
      {"thought", "think"}, {"caught", "catch"},  {"taught", "teach"},
      {"sought", "seek"},  {"fought", "fight"},   {"made", "make"},
      {"said", "say"},     {"paid", "pay"},       {"laid", "lay"},
      {"took", "take"},    {"taken", "take"},     {"gave", "give"},
      {"given", "give"},   {"came", "come"},      {"saw", "see"},
      {"seen", "see"},     {"knew", "know"},      {"known", "know"},
      {"got", "get"},      {"gotten", "get"},     {"found", "find"},
      {"told", "tell"},    {"sold", "sell"},      {"held", "hold"},
      {"left", "leave"},   {"felt", "feel"},      {"kept", "keep"},
      {"slept", "sleep"},  {"meant", "mean"},     {"met", "meet"},
      {"ran", "run"},      {"began", "begin"},    {"begun", "begin"},
      {"wrote", "write"},  {"written", "write"},  {"spoke", "speak"},
      {"spoken", "speak"}, {"broke", "break"},    {"broken", "break"},
      {"chose", "choose"}, {"chosen", "choose"},  {"drove", "drive"},
      {"driven", "drive"}, {"ate", "eat"},        {"eaten", "eat"},
      {"fell", "fall"},    {"fallen", "fall"},    {"grew", "grow"},
      {"grown", "grow"},   {"threw", "throw"},    {"thrown", "throw"},
      {"flew", "fly"},     {"flown", "fly"},      {"drew", "draw"},
      {"drawn", "draw"},   {"wore", "wear"},      {"worn", "wear"},
      {"tore", "tear"},    {"torn", "tear"},      {"stood", "stand"},
      {"understood", "understand"}, {"sat", "sit"}, {"won", "win"},
      {"lost", "lose"},    {"built", "build"},    {"sent", "send"},
      {"spent", "spend"},  {"lent", "lend"},      {"bent", "bend"},
      {"led", "lead"},     {"fed", "feed"},       {"fled", "flee"},
      {"heard", "hear"},   {"rode", "ride"},      {"ridden", "ride"},
      {"rose", "rise"},    {"risen", "rise"},     {"shook", "shake"},
      {"shaken", "shake"}, {"stole", "steal"},    {"stolen", "steal"},
      {"swam", "swim"},    {"sang", "sing"},      {"sung", "sing"},
      {"rang", "ring"},    {"drank", "drink"},    {"drunk", "drink"},
      {"forgot", "forget"}, {"forgotten", "forget"}, {"hid", "hide"},
      {"hidden", "hide"},  {"bit", "bite"},       {"bitten", "bite"},
      {"dug", "dig"},      {"hung", "hang"},      {"struck", "strike"},
      {"stuck", "stick"},  {"swung", "swing"},    {"woke", "wake"},
      {"woken", "wake"},   {"froze", "freeze"},   {"frozen", "freeze"},
      {"dealt", "deal"},   {"dreamt", "dream"},   {"learnt", "learn"},
      {"burnt", "burn"},   {"lit", "light"},      {"shot", "shoot"},
      {"slid", "slide"},   {"spun", "spin"},      {"wept", "weep"},
      {"swept", "sweep"},  {"crept", "creep"},    {"knelt", "kneel"},
      {"became", "become"}, {"overcame", "overcome"},
  };
  adj_exceptions_ = {
      {"better", "good"},  {"best", "good"},    {"worse", "bad"},
      {"worst", "bad"},    {"more", "much"},    {"most", "much"},
      {"less", "little"},  {"least", "little"}, {"further", "far"},
      {"farther", "far"},  {"furthest", "far"}, {"farthest", "far"},
      {"elder", "old"},    {"eldest", "old"},
  };
  // Adjectives whose -er/-est is part of the base form.
  for (const char* base :
       {"clever", "bitter", "tender", "eager", "proper", "sober", "slender",
        "silver", "over", "under", "other", "former", "latter", "inner",
        "outer", "upper", "utter", "super", "sheer", "queer", "modest",
        "honest", "earnest", "sinister", "severe", "sincere", "mere",
        "bizarre", "obscure", "mature", "secure", "pure", "rare", "aware",
        "whether", "together", "forest", "interest", "amber", "somber",
        "bare", "sure", "dear", "clear", "near", "poor", "sour"}) {
    adj_exceptions_.emplace(base, base);
  }
}

std::string RuleLemmatizer::Lemmatize(std::string_view word, Pos pos) const {
  const std::string w = ToLower(word);
  if (!IsAlphabeticWord(w)) return w;
  switch (pos) {
    case Pos::kNoun:
      if (auto it = noun_exceptions_.find(w); it != noun_exceptions_.end()) {
        return it->second;
      }
      return NounLemma(w);
    case Pos::kVerb:
      if (auto it = verb_exceptions_.find(w); it != verb_exceptions_.end()) {
        return it->second;
      }
      return VerbLemma(w);
    case Pos::kAdj:
      if (auto it = adj_exceptions_.find(w); it != adj_exceptions_.end()) {
        return it->second;
      }
      return AdjLemma(w);
    case Pos::kAdv:
      return w;
  }
  return w;
}

TableLemmatizer::TableLemmatizer(const std::filesystem::path& path,
                                 std::shared_ptr<const Lemmatizer> fallback)
    : fallback_(std::move(fallback)) {
  std::size_t lineno = 0;
  for (const auto& line : ReadLines(path)) {
    ++lineno;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 3) {
      throw LexsubError(ErrorCode::kParseError,
                        path.string() + ":" + std::to_string(lineno));
    }
    const Pos pos = ParsePos(fields[1]);
    table_[ToLower(fields[0]) + '\t' + PosLetter(pos)] = ToLower(fields[2]);
  }
}

std::string TableLemmatizer::Lemmatize(std::string_view word, Pos pos) const {
  const std::string w = ToLower(word);
  if (auto it = table_.find(w + '\t' + PosLetter(pos)); it != table_.end()) {
    return it->second;
  }
  return fallback_ ? fallback_->Lemmatize(w, pos) : w;
}

std::shared_ptr<const Lemmatizer> DefaultLemmatizer() {
  static const auto kInstance = std::make_shared<const RuleLemmatizer>();
  return kInstance;
}

}  // namespace lexsub
