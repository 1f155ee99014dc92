#include "synthetic_snips.hpp"

#include <sstream>

#include "lexsub/io.hpp"

namespace testing_support {

using lexsub::DerivedRng;
using lexsub::SlotSpan;
using lexsub::SlotUtterance;

const std::map<std::string, std::size_t>& SnipsTrainCounts() {
  static const std::map<std::string, std::size_t> counts = {
      {"AddToPlaylist", 1818},        {"BookRestaurant", 1881},
      {"GetWeather", 1896},           {"PlayMusic", 1914},
      {"RateBook", 1876},             {"SearchCreativeWork", 1847},
      {"SearchScreeningEvent", 1852}};
  return counts;
}

namespace {

std::vector<std::string> Combine(const std::vector<std::string>& heads,
                                 const std::vector<std::string>& tails) {
  std::vector<std::string> out;
  for (const auto& h : heads) {
    for (const auto& t : tails) out.push_back(h + t);
  }
  return out;
}

const std::map<std::string, std::vector<std::string>>& Lexicons() {
  static const std::map<std::string, std::vector<std::string>> lex = {
      {"artist", Combine({"ka", "lo", "mi", "ra", "ze", "to", "vu", "ne"},
                         {"velle", "mora", "dexa", "linn", "sori"})},
      {"playlist", {"chill", "workout", "party", "focus", "sunday", "roadtrip",
                    "sleep", "summer", "rainy", "study", "dinner", "indie"}},
      {"music_item", {"song", "track", "album", "tune", "record", "single"}},
      {"cuisine", {"italian", "thai", "mexican", "french", "greek", "indian",
                   "korean", "turkish", "spanish", "vietnamese", "lebanese",
                   "ethiopian"}},
      {"city", {"paris", "boston", "denver", "lisbon", "oslo", "madrid", "dublin",
                "austin", "seattle", "vienna", "prague", "chicago", "berlin",
                "toronto", "sydney", "geneva", "houston", "milan", "munich",
                "portland"}},
      {"party_size", {"two", "three", "four", "five", "six", "seven", "eight"}},
      {"restaurant", Combine({"bella", "golden", "blue", "little", "old"},
                             {"fork", "table", "garden", "kitchen", "oven"})},
      {"condition", {"sunny", "rainy", "cloudy", "windy", "snowy", "foggy",
                     "humid", "chilly"}},
      {"timerange", {"tomorrow", "tonight", "today", "friday", "saturday",
                     "sunday", "monday", "later", "soon"}},
      {"genre", {"jazz", "rock", "blues", "techno", "folk", "soul", "reggae",
                 "punk", "metal", "disco"}},
      {"service", {"spotify", "deezer", "youtube", "pandora", "itunes"}},
      {"year", {"eighties", "nineties", "seventies", "sixties"}},
      {"rating", {"one", "two", "three", "four", "five", "zero", "six"}},
      {"best_rating", {"five", "six", "ten"}},
      {"object_type", {"book", "novel", "textbook", "essay", "saga", "chronicle"}},
      {"book", Combine({"dark", "silent", "lost", "hidden", "burning", "winter"},
                       {"harbor", "crown", "forest", "empire", "letters"})},
      {"work_type", {"book", "movie", "show", "album", "game", "trailer", "novel"}},
      {"theatre", Combine({"regal", "grand", "star", "odeon", "vista"},
                          {"cinema", "plaza", "theatre", "screens"})},
      {"movie", Combine({"night", "iron", "blue", "last", "wild", "cold"},
                        {"runner", "tide", "signal", "frontier", "harvest"})},
  };
  return lex;
}

const std::map<std::string, std::vector<std::string>>& Templates() {
  static const std::map<std::string, std::vector<std::string>> t = {
      {"AddToPlaylist",
       {"add {artist} to my {playlist} playlist",
        "put this {music_item} by {artist} on {playlist}",
        "please add the {music_item} to {playlist}",
        "can you add {artist} to the {playlist} list",
        "i want this {music_item} in my {playlist} playlist"}},
      {"BookRestaurant",
       {"book a table for {party_size} at a {cuisine} restaurant in {city}",
        "reserve a {cuisine} place for {party_size} people",
        "i want to book a table in {city} for {party_size}",
        "can you reserve {restaurant} in {city} {timerange}",
        "book {restaurant} for {party_size} {timerange}"}},
      {"GetWeather",
       {"what is the weather in {city}",
        "will it be {condition} in {city} {timerange}",
        "tell me the forecast for {city} {timerange}",
        "is it going to be {condition} {timerange}",
        "can you check if {city} will be {condition}"}},
      {"PlayMusic",
       {"play a {music_item} by {artist}",
        "i want to hear some {genre} music",
        "play {genre} from the {year} on {service}",
        "can you play {artist} on {service}",
        "play the {music_item} by {artist} please"}},
      {"RateBook",
       {"rate this {object_type} {rating} out of {best_rating}",
        "give {book} {rating} stars",
        "i would rate {book} a {rating}",
        "rate the current {object_type} {rating} points",
        "give this {object_type} {rating} out of {best_rating}"}},
      {"SearchCreativeWork",
       {"find the {work_type} called {book}",
        "search for the {work_type} {movie}",
        "can you find me the {work_type} {book}",
        "i want to see the {work_type} {movie}",
        "look up the {work_type} named {book}"}},
      {"SearchScreeningEvent",
       {"what movies are playing at {theatre} {timerange}",
        "find the schedule for {movie} in {city}",
        "show me movie times at {theatre}",
        "when is {movie} playing {timerange}",
        "is {movie} showing at {theatre} {timerange}"}},
  };
  return t;
}

SlotUtterance Fill(const std::string& intent, const std::string& tmpl,
                   DerivedRng& rng, std::size_t ordinal) {
  SlotUtterance utt;
  utt.intent = intent;
  utt.id = intent + "-" + std::to_string(ordinal);
  for (const auto& word : lexsub::SplitWhitespace(tmpl)) {
    if (word.front() == '{') {
      const auto slot = word.substr(1, word.size() - 2);
      const auto& values = Lexicons().at(slot);
      const auto value = lexsub::SplitWhitespace(values[rng.Below(values.size())]);
      const std::size_t start = utt.tokens.size();
      utt.tokens.insert(utt.tokens.end(), value.begin(), value.end());
      utt.slots.push_back({start, utt.tokens.size(), slot});
    } else {
      utt.tokens.push_back(word);
    }
  }
  return utt;
}

}  // namespace

std::vector<SlotUtterance> SyntheticSnips(std::uint64_t seed, std::size_t per_intent) {
  std::vector<SlotUtterance> out;
  std::uint64_t intent_no = 0;
  for (const auto& [intent, count] : SnipsTrainCounts()) {
    DerivedRng rng(seed, intent_no++);
    const auto& templates = Templates().at(intent);
    const std::size_t n = per_intent == 0 ? count : per_intent;
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(Fill(intent, templates[rng.Below(templates.size())], rng, i));
    }
  }
  return out;
}

std::vector<std::string> Sentences(const std::vector<SlotUtterance>& data) {
  std::vector<std::string> out;
  out.reserve(data.size());
  for (const auto& utt : data) {
    std::ostringstream s;
    for (std::size_t i = 0; i < utt.tokens.size(); ++i) s << (i ? " " : "") << utt.tokens[i];
    out.push_back(s.str());
  }
  return out;
}

SlotUtterance RandomUtterance(DerivedRng& rng, std::size_t index) {
  static const std::vector<std::string> words = {"play", "some", "music", "by", "the",
                                                 "band", "in", "paris", "tonight", "a"};
  SlotUtterance utt;
  utt.id = "r" + std::to_string(index);
  utt.intent = "Intent" + std::to_string(rng.Below(3));
  const std::size_t n = 1 + rng.Below(12);
  for (std::size_t i = 0; i < n; ++i) utt.tokens.push_back(words[rng.Below(words.size())]);
  const std::size_t want = rng.Below(4);
  std::size_t pos = 0;
  for (std::size_t s = 0; s < want && pos < n; ++s) {
    const std::size_t start = pos + rng.Below(n - pos);
    const std::size_t end = start + 1 + rng.Below(std::min<std::size_t>(3, n - start));
    utt.slots.push_back({start, end, "slot" + std::to_string(s)});
    pos = end;
  }
  return utt;
}

}  // namespace testing_support
