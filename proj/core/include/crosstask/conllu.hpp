#pragma once

#include <string>
#include <vector>

namespace crosstask::conllu {

struct Token {
    int id = 0;           // column 1
    std::string form;     // column 2
    std::string upos;     // column 4
    int head = 0;         // column 7
    std::string deprel;   // column 8
};

struct Sentence {
    std::vector<std::string> comments;  // leading '#' lines, verbatim
    std::vector<Token> tokens;
};

/// Universal Dependencies CoNLL-U: 10 tab-separated columns, sentences
/// separated by blank lines, '#' comments. Multiword-token ranges (1-2)
/// and enhanced-dependency empty nodes (2.1) are skipped.
std::vector<Sentence> load_conllu(const std::string& path);
std::vector<Sentence> parse_conllu(const std::string& text, const std::string& origin);

/// Groups sentences into documents on `# newdoc` markers. Without any
/// marker every sentence is its own document.
struct Document {
    std::string id;  // from "# newdoc id = ..." when present
    std::vector<Sentence> sentences;
};
std::vector<Document> group_by_document(const std::vector<Sentence>& sentences);

}  // namespace crosstask::conllu
