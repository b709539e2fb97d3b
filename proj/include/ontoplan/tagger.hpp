#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ontoplan/errors.hpp"

namespace ontoplan {

enum class Pos { Verb, Noun, Adj, Det, Prep, Conj, Punct, Other };

struct Token {
  std::string text;
  Pos pos = Pos::Other;
  int index = 0;
};

struct Clause {
  std::string task;  // canonical: clean | arrange | put | serve | stack
  std::vector<std::string> objects;  // mention order, lowercase, compounds joined by '_'
  std::optional<std::string> destination;

  bool operator==(const Clause&) const = default;
};

struct TaggedCommand {
  std::vector<Clause> clauses;

  bool operator==(const TaggedCommand&) const = default;
};

// Whitespace/punctuation split; commas and periods become Punct tokens;
// underscore-joined words stay single tokens. Pos is left unset.
std::vector<Token> tokenize(const std::string& input);

// Closed-lexicon POS tagging with fallbacks: unknown word with a digit
// suffix -> Noun, "-ly" suffix -> Other, otherwise Noun. Task verbs are
// always Verb.
std::vector<Token> tag_pos(std::vector<Token> tokens);

// Canonical task for a verb form ("move" -> "put", "placing" -> "put", ...);
// nullopt when the word is not a task verb.
std::optional<std::string> canonical_task(const std::string& word);

// One clause per task verb; objects are the nouns following the verb, the
// noun after the last locative preposition (in/on/to/into/onto) is the
// destination. Throws NoTaskFound / EmptyObjects.
TaggedCommand extract_command(const std::string& input);

std::string to_string(const TaggedCommand& cmd);

}  // namespace ontoplan
