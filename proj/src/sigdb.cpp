#include <fstream>
#include <sstream>

#include "tb/corpus.hpp"

namespace tb {

SignatureDB SignatureDB::parse(const std::string& text, const std::string& origin) {
  SignatureDB db;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  std::vector<std::string> block;
  int block_start = 0;
  auto flush_class = [&] {
    if (block.empty()) return;
    std::string joined;
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (i) joined += "\n";
      joined += block[i];
    }
    ClassDef def;
    try {
      def = parse_class_def(joined);
    } catch (const SyntaxError& e) {
      throw std::runtime_error(origin + ":" + std::to_string(block_start) + ": " +
                               e.what());
    }
    if (!db.class_defs.emplace(def.name, joined).second)
      throw std::runtime_error(origin + ":" + std::to_string(block_start) +
                               ": duplicate class " + def.name);
    db.parsed_class_defs.emplace(def.name, std::move(def));
    block.clear();
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '#') continue;
    bool blank = line.find_first_not_of(" \t") == std::string::npos;
    bool indented = !blank && (line[0] == ' ' || line[0] == '\t');

    if (!block.empty()) {
      if (indented) {
        block.push_back(line);
        continue;
      }
      flush_class();
    }
    if (blank) continue;

    if (line.rfind("class", 0) == 0) {
      block.push_back(line);
      block_start = lineno;
      continue;
    }

    TypeSignature sig;
    try {
      sig = parse_signature(line);
    } catch (const SyntaxError& e) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
    if (!db.entries.emplace(sig.binding, line).second)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": duplicate entry " + sig.binding);
    db.parsed_entries.emplace(sig.binding, std::move(sig));
  }
  flush_class();
  return db;
}

SignatureDB SignatureDB::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open signature database: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

}  // namespace tb
