#include "ontoplan/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace ontoplan {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

const std::map<std::string, std::string>& verb_forms() {
  static const std::map<std::string, std::string> forms = {
      {"put", "put"},         {"puts", "put"},       {"putting", "put"},
      {"place", "put"},       {"places", "put"},     {"placing", "put"},
      {"placed", "put"},      {"move", "put"},       {"moves", "put"},
      {"moving", "put"},      {"moved", "put"},      {"bring", "put"},
      {"brings", "put"},      {"bringing", "put"},   {"clean", "clean"},
      {"cleans", "clean"},    {"cleaning", "clean"}, {"arrange", "arrange"},
      {"arranges", "arrange"},{"arranging", "arrange"}, {"serve", "serve"},
      {"serves", "serve"},    {"serving", "serve"},  {"stack", "stack"},
      {"stacks", "stack"},    {"stacking", "stack"},
  };
  return forms;
}

const std::set<std::string>& noun_lexicon() {
  static const std::set<std::string> nouns = {
      "apple",    "banana",      "bowl",     "plate",   "plates", "cup",
      "cups",     "bread",       "table",    "tray",    "sugar",  "box",
      "tomato",   "can",         "cracker",  "breakfast", "item", "items",
      "crockery", "food",        "kitchen",  "counter", "shelf",  "sugar_box",
      "tomato_can", "cracker_box", "left_table", "right_table", "green_cup",
      "kettle",   "toaster",     "utensil",  "utensils", "container",
      "containers", "fork",      "spoon",    "knife",   "mug",
  };
  return nouns;
}

const std::set<std::string>& adj_lexicon() {
  static const std::set<std::string> adjs = {"green", "red",  "blue",  "left",
                                             "right", "boxed", "large", "small",
                                             "big",   "dirty"};
  return adjs;
}

const std::set<std::string>& det_lexicon() {
  static const std::set<std::string> dets = {"the", "a", "an", "this", "that",
                                             "all", "every"};
  return dets;
}

const std::set<std::string>& prep_lexicon() {
  static const std::set<std::string> preps = {"in",   "on",   "to",   "into",
                                              "onto", "at",   "from", "by",
                                              "with", "over", "under"};
  return preps;
}

// Pronouns and fillers that would otherwise fall through to the Noun
// fallback and pollute object lists.
const std::set<std::string>& other_lexicon() {
  static const std::set<std::string> others = {
      "me",   "you",  "it",    "them", "us",   "him",     "her",  "please",
      "then", "now",  "first", "next", "also", "finally", "some", "there"};
  return others;
}

const std::set<std::string>& locative_preps() {
  static const std::set<std::string> locs = {"in", "on", "to", "into", "onto"};
  return locs;
}

bool is_conj(const std::string& w) { return w == "and" || w == "or"; }

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '\'';
}

// A token stream entry after compound joining.
struct Word {
  std::string text;  // lowercase
  Pos pos;
  int last_index;  // index of the final source token merged into this word
};

}  // namespace

std::vector<Token> tokenize(const std::string& input) {
  std::vector<Token> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    tokens.push_back({current, Pos::Other, static_cast<int>(tokens.size())});
    current.clear();
  };
  for (char c : input) {
    if (is_word_char(c)) {
      current.push_back(c);
    } else if (c == ',' || c == '.' || c == ';' || c == '!' || c == '?' || c == ':') {
      flush();
      tokens.push_back({std::string(1, c), Pos::Punct,
                        static_cast<int>(tokens.size())});
    } else {
      flush();  // whitespace or anything else separates words
    }
  }
  flush();
  return tokens;
}

std::optional<std::string> canonical_task(const std::string& word) {
  auto it = verb_forms().find(lower(word));
  if (it == verb_forms().end()) return std::nullopt;
  return it->second;
}

std::vector<Token> tag_pos(std::vector<Token> tokens) {
  for (Token& t : tokens) {
    if (t.pos == Pos::Punct) continue;
    const std::string w = lower(t.text);
    if (canonical_task(w)) {
      t.pos = Pos::Verb;
    } else if (noun_lexicon().count(w)) {
      t.pos = Pos::Noun;
    } else if (adj_lexicon().count(w)) {
      t.pos = Pos::Adj;
    } else if (det_lexicon().count(w)) {
      t.pos = Pos::Det;
    } else if (prep_lexicon().count(w)) {
      t.pos = Pos::Prep;
    } else if (is_conj(w)) {
      t.pos = Pos::Conj;
    } else if (other_lexicon().count(w)) {
      t.pos = Pos::Other;
    } else if (!w.empty() && std::isdigit(static_cast<unsigned char>(w.back()))) {
      t.pos = Pos::Noun;  // plate1, plate2, ...
    } else if (w.size() > 2 && w.compare(w.size() - 2, 2, "ly") == 0) {
      t.pos = Pos::Other;
    } else {
      t.pos = Pos::Noun;  // unknown words are treated as object names
    }
  }
  return tokens;
}

TaggedCommand extract_command(const std::string& input) {
  std::vector<Token> tokens = tag_pos(tokenize(input));

  // Join compound nouns: a Noun immediately preceded by an Adj or Noun merges
  // into one underscore-joined name ("left table" -> "left_table").
  std::vector<Word> words;
  for (const Token& t : tokens) {
    const std::string w = lower(t.text);
    if (t.pos == Pos::Noun && !words.empty()) {
      Word& prev = words.back();
      if ((prev.pos == Pos::Noun || prev.pos == Pos::Adj) &&
          prev.last_index == t.index - 1) {
        prev.text += "_" + w;
        prev.pos = Pos::Noun;
        prev.last_index = t.index;
        continue;
      }
    }
    words.push_back({w, t.pos, t.index});
  }

  // Clause boundaries at task verbs.
  std::vector<size_t> verb_at;
  for (size_t i = 0; i < words.size(); ++i)
    if (words[i].pos == Pos::Verb) verb_at.push_back(i);
  if (verb_at.empty()) throw NoTaskFound("no task verb found in: " + input);

  TaggedCommand cmd;
  for (size_t v = 0; v < verb_at.size(); ++v) {
    const size_t begin = verb_at[v];
    const size_t end = v + 1 < verb_at.size() ? verb_at[v + 1] : words.size();
    Clause clause;
    clause.task = *canonical_task(words[begin].text);

    // Nouns in the clause; the noun after the last locative preposition is
    // the destination, the rest are manipulated objects.
    std::optional<size_t> last_locative;
    for (size_t i = begin + 1; i < end; ++i)
      if (words[i].pos == Pos::Prep && locative_preps().count(words[i].text))
        last_locative = i;

    std::optional<size_t> dest_at;
    if (last_locative) {
      for (size_t i = *last_locative + 1; i < end; ++i) {
        if (words[i].pos == Pos::Noun) {
          dest_at = i;
          break;
        }
      }
    }
    for (size_t i = begin + 1; i < end; ++i) {
      if (words[i].pos != Pos::Noun) continue;
      if (dest_at && i == *dest_at) continue;
      clause.objects.push_back(words[i].text);
    }
    if (dest_at) clause.destination = words[*dest_at].text;

    if (clause.objects.empty() &&
        (clause.task == "put" || clause.task == "serve" || clause.task == "stack"))
      throw EmptyObjects("clause '" + clause.task + "' has no objects in: " + input);
    cmd.clauses.push_back(std::move(clause));
  }
  return cmd;
}

std::string to_string(const TaggedCommand& cmd) {
  std::ostringstream out;
  for (size_t i = 0; i < cmd.clauses.size(); ++i) {
    const Clause& c = cmd.clauses[i];
    out << "clause " << i + 1 << ": task=" << c.task << " objects=[";
    for (size_t j = 0; j < c.objects.size(); ++j) {
      if (j) out << ", ";
      out << c.objects[j];
    }
    out << "]";
    if (c.destination) out << " destination=" << *c.destination;
    out << "\n";
  }
  return out.str();
}

}  // namespace ontoplan
