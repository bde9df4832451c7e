#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "corpus.hpp"
#include "error.hpp"

namespace scorelens::corpus {

namespace {

struct Block {
  std::optional<std::string> sent_id;
  std::vector<std::string> forms;
  std::vector<std::string> lemmas;
  std::vector<int> heads;
  std::vector<std::string> labels;
  std::size_t lineno = 0;  // first line, for diagnostics
};

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

std::vector<Block> read_blocks(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CoNLL-U file: " + path);
  std::vector<Block> blocks;
  Block cur;
  bool any = false;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (any) blocks.push_back(std::move(cur));
    cur = Block{};
    any = false;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      const std::size_t eq = line.find('=');
      if (line.compare(0, 9, "# sent_id") == 0 && eq != std::string::npos) {
        std::string v = line.substr(eq + 1);
        const std::size_t b = v.find_first_not_of(" \t");
        cur.sent_id = b == std::string::npos ? std::string{} : v.substr(b);
      }
      if (!any) cur.lineno = lineno;
      any = true;
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() != 10)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 10 tab-separated columns");
    const std::string& id = cols[0];
    // skip multiword-token ranges (1-2) and empty nodes (1.1): only syntactic words align
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) {
      any = true;
      continue;
    }
    if (!any) cur.lineno = lineno;
    any = true;
    cur.forms.push_back(cols[1]);
    cur.lemmas.push_back(cols[2]);
    int head;
    try {
      head = std::stoi(cols[6]);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": HEAD column is not an integer");
    }
    cur.heads.push_back(head);
    cur.labels.push_back(cols[7]);
  }
  flush();
  // drop comment-only blocks
  std::vector<Block> out;
  for (auto& b : blocks)
    if (!b.forms.empty()) out.push_back(std::move(b));
  return out;
}

void validate_tree(const Block& b, const std::string& where) {
  const int n = static_cast<int>(b.heads.size());
  int roots = 0;
  for (int h : b.heads) {
    if (h < 0 || h > n)
      throw ValidationError(where + ": head index " + std::to_string(h) + " out of range [0, " +
                            std::to_string(n) + "]");
    if (h == 0) ++roots;
  }
  if (roots != 1)
    throw ValidationError(where + ": expected exactly one root, found " + std::to_string(roots));
  // acyclic: every token must reach the root
  for (int i = 0; i < n; ++i) {
    int cur = i, steps = 0;
    while (b.heads[static_cast<std::size_t>(cur)] != 0) {
      cur = b.heads[static_cast<std::size_t>(cur)] - 1;
      if (++steps > n) throw ValidationError(where + ": dependency cycle involving token " +
                                             std::to_string(i + 1));
    }
  }
}

}  // namespace

ConlluAttachment attach_conllu(const Corpus& corpus, const std::string& path) {
  const auto blocks = read_blocks(path);

  const bool keyed = !blocks.empty() && std::all_of(blocks.begin(), blocks.end(), [](const Block& b) {
    return b.sent_id.has_value();
  });

  ConlluAttachment result;
  result.corpus = corpus;

  // (essay index, sentence index) -> block
  std::map<std::pair<std::size_t, std::size_t>, const Block*> assignment;
  if (keyed) {
    std::map<std::string, std::size_t> essay_index;
    for (std::size_t i = 0; i < corpus.essays.size(); ++i) essay_index[corpus.essays[i].id] = i;
    for (const auto& b : blocks) {
      const std::string& key = *b.sent_id;
      const std::size_t colon = key.rfind(':');
      if (colon == std::string::npos)
        throw ValidationError(path + ": sent_id '" + key + "' is not 'essayId:sentenceIndex'");
      const std::string essay_id = key.substr(0, colon);
      std::size_t sent;
      try {
        sent = static_cast<std::size_t>(std::stoul(key.substr(colon + 1)));
      } catch (const std::exception&) {
        throw ValidationError(path + ": sent_id '" + key + "' has a non-numeric sentence index");
      }
      const auto it = essay_index.find(essay_id);
      if (it == essay_index.end()) continue;  // annotations for other corpora are ignored
      if (sent >= corpus.essays[it->second].sentences.size())
        throw ValidationError(path + ": sent_id '" + key + "' indexes past the last sentence");
      assignment[{it->second, sent}] = &b;
    }
  } else {
    // positional: blocks align 1:1 with the corpus sentence stream
    std::size_t bi = 0;
    for (std::size_t e = 0; e < corpus.essays.size() && bi < blocks.size(); ++e) {
      for (std::size_t s = 0; s < corpus.essays[e].sentences.size() && bi < blocks.size(); ++s) {
        assignment[{e, s}] = &blocks[bi++];
      }
    }
  }

  for (std::size_t e = 0; e < result.corpus.essays.size(); ++e) {
    Essay& essay = result.corpus.essays[e];
    for (std::size_t s = 0; s < essay.sentences.size(); ++s) {
      const auto it = assignment.find({e, s});
      if (it == assignment.end()) {
        result.unannotated.push_back(essay.id + ":" + std::to_string(s));
        continue;
      }
      const Block& b = *it->second;
      Sentence& sent = essay.sentences[s];
      const std::string where = path + " (sentence " + essay.id + ":" + std::to_string(s) +
                                ", block at line " + std::to_string(b.lineno) + ")";
      if (b.forms.size() != sent.tokens.size())
        throw ValidationError(where + ": block has " + std::to_string(b.forms.size()) +
                              " words but the sentence has " + std::to_string(sent.tokens.size()) +
                              " tokens");
      validate_tree(b, where);
      DepTree tree;
      tree.heads = b.heads;
      tree.labels = b.labels;
      sent.dep = std::move(tree);
      for (std::size_t t = 0; t < sent.tokens.size(); ++t) {
        if (b.lemmas[t] != "_" && !b.lemmas[t].empty()) sent.tokens[t].lemma = b.lemmas[t];
      }
    }
  }
  return result;
}

}  // namespace scorelens::corpus
