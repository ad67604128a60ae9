#include "scorekeeping/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <initializer_list>

#include "scorekeeping/errors.hpp"

namespace scorekeeping {

namespace {

WordSet make(std::initializer_list<std::string_view> words) {
  WordSet out;
  for (auto w : words) out.emplace(w);
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

Lexicons build_defaults() {
  Lexicons lex;
  lex.positive_cues = make({"yes", "yeah", "yep", "yup"});
  lex.negative_cues = make({"no", "nope", "not", "none", "nothing", "0", "zero"});
  lex.colors = make({"black", "white", "red", "green", "yellow", "blue", "brown", "orange", "pink", "purple",
                     "gray", "grey", "tan", "beige", "golden", "silver"});
  lex.adjectives = make({
      "sunny", "cloudy", "rainy", "snowy", "foggy", "windy", "overcast", "bright", "dark", "dim", "light",
      "big", "small", "large", "little", "tiny", "huge", "tall", "short", "long", "wide", "narrow", "thin",
      "thick", "fat", "old", "new", "young", "modern", "clean", "dirty", "messy", "neat", "wet", "dry",
      "empty", "full", "crowded", "busy", "open", "closed", "shiny", "colorful", "blurry", "clear", "sharp",
      "hot", "cold", "warm", "cool", "sunlit", "indoors", "outdoors", "inside", "outside", "daytime",
      "nighttime", "wooden", "metal", "plastic", "glass", "furry", "fluffy", "happy", "sad", "cute", "pretty",
      "beautiful", "ugly", "fresh", "ripe", "cooked", "raw", "healthy", "tasty", "round", "square", "flat",
      "striped", "spotted", "plain", "fancy", "real", "fake", "broken", "chipped", "rusty", "wild", "tame",
      "asleep", "awake", "sleeping", "moving", "parked", "lit", "sliced", "whole", "calm", "rough", "smooth",
      "black", "white", "red", "green", "yellow", "blue", "brown", "orange", "pink", "purple", "gray", "grey",
      "tan", "beige", "golden", "silver", "professional", "visible", "noisy", "quiet", "safe", "shallow", "deep"});
  lex.nouns = make({
      "man", "men", "woman", "women", "person", "people", "boy", "girl", "child", "children", "kid", "kids",
      "baby", "player", "players", "skier", "surfer", "skateboarder", "rider", "lady", "guy", "couple", "group",
      "crowd", "team", "family", "dog", "dogs", "cat", "cats", "horse", "horses", "cow", "cows", "sheep",
      "bird", "birds", "elephant", "elephants", "giraffe", "giraffes", "zebra", "zebras", "bear", "bears",
      "animal", "animals", "herd", "flock", "duck", "ducks", "puppy", "kitten", "car", "cars", "truck",
      "trucks", "bus", "buses", "train", "trains", "plane", "planes", "airplane", "jet", "boat", "boats",
      "ship", "bike", "bicycle", "motorcycle", "motorcycles", "vehicle", "taxi", "van", "table", "tables",
      "chair", "chairs", "bench", "benches", "couch", "sofa", "bed", "beds", "desk", "shelf", "kitchen",
      "bathroom", "bedroom", "room", "window", "windows", "door", "doors", "wall", "walls", "floor",
      "ceiling", "sink", "toilet", "tub", "bathtub", "shower", "mirror", "stove", "oven", "fridge",
      "refrigerator", "microwave", "counter", "cabinet", "cabinets", "lamp", "clock", "tv",
      "television", "computer", "laptop", "keyboard", "mouse", "phone", "screen", "remote", "book", "books",
      "vase", "plant", "plants", "flower", "flowers", "tree", "trees", "bush", "grass", "field", "park",
      "street", "road", "sidewalk", "building", "buildings", "house", "city", "beach", "ocean", "sea",
      "water", "lake", "river", "mountain", "mountains", "hill", "sky", "sun", "snow", "slope", "fence",
      "pole", "sign", "signs", "plate", "plates", "bowl", "bowls", "cup", "cups", "mug", "glass", "bottle",
      "bottles", "fork", "knife", "spoon", "pizza", "sandwich", "cake", "dessert", "serving", "food", "meal",
      "fruit", "fruits", "apple", "apples", "banana", "bananas", "orange", "oranges", "broccoli", "carrot",
      "carrots", "donut", "donuts", "salad", "bread", "umbrella", "umbrellas", "kite", "kites",
      "frisbee", "ball", "bat", "glove", "racket", "skateboard", "surfboard", "skis", "board", "wave",
      "waves", "hat", "shirt", "jacket", "suitcase", "bag", "backpack", "tie", "teddy", "toy", "toys",
      "hydrant", "statue", "tower", "bridge", "track", "tracks", "station", "airport", "runway", "area",
      "photo", "picture", "image", "scene", "view", "stand", "store", "market", "restaurant", "pen",
      "desert", "forest", "yard", "garden", "pool", "court", "traffic", "berries"});
  lex.irregular_plurals = make({"people", "men", "women", "children", "sheep", "fish", "feet", "teeth"});
  lex.determiners = make({"a", "an", "the", "any", "some"});
  lex.prepositions = make({"on", "in", "at", "of", "with", "near", "behind", "under", "over", "by",
                           "beside", "next", "inside", "outside", "around", "above", "below", "from", "for",
                           "into", "onto", "across", "along", "between"});
  lex.pronouns = make({"he", "she", "it", "they", "his", "her", "its", "their", "him", "them", "hers",
                       "theirs", "this", "that", "these", "those"});
  return lex;
}

}  // namespace

const Lexicons& Lexicons::defaults() {
  static const Lexicons kDefaults = build_defaults();
  return kDefaults;
}

WordSet load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open word list: " + path.string());
  WordSet out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    std::string word = line.substr(begin, end - begin + 1);
    for (auto& c : word) {
      if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    out.insert(std::move(word));
  }
  return out;
}

bool looks_plural(const Lexicons& lex, std::span<const std::string> phrase) {
  if (phrase.empty()) return false;
  std::size_t head = phrase.size() - 1;
  for (std::size_t i = 1; i < phrase.size(); ++i) {
    if (lex.prepositions.contains(phrase[i])) {
      head = i - 1;
      break;
    }
  }
  const std::string& word = phrase[head];
  if (lex.irregular_plurals.contains(word)) return true;
  if (word.size() < 2 || !ends_with(word, "s")) return false;
  return !ends_with(word, "ss") && !ends_with(word, "us") && !ends_with(word, "is");
}

}  // namespace scorekeeping
