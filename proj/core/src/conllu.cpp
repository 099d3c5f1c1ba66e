#include "crosstask/conllu.hpp"

#include <fstream>
#include <sstream>

#include "crosstask/errors.hpp"

namespace crosstask::conllu {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            cols.push_back(line.substr(start));
            break;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return cols;
}

int parse_int(const std::string& s, size_t line_no, const char* what) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::kParse,
             "line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
    }
}

}  // namespace

std::vector<Sentence> parse_conllu(const std::string& text, const std::string& origin) {
    std::vector<Sentence> sentences;
    Sentence cur;
    bool has_content = false;

    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    auto flush = [&] {
        if (has_content) {
            sentences.push_back(std::move(cur));
            cur = Sentence{};
            has_content = false;
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') {
            cur.comments.push_back(line);
            has_content = true;
            continue;
        }
        auto cols = split_tabs(line);
        if (cols.size() != 10)
            fail(ErrorCode::kParse, origin + " line " + std::to_string(line_no) + ": expected 10 columns, got " +
                                        std::to_string(cols.size()));
        // Skip multiword ranges (1-2) and empty nodes (2.1).
        if (cols[0].find('-') != std::string::npos || cols[0].find('.') != std::string::npos) {
            has_content = true;
            continue;
        }
        Token t;
        t.id = parse_int(cols[0], line_no, "token id");
        t.form = cols[1];
        t.upos = cols[3];
        t.head = cols[6] == "_" ? -1 : parse_int(cols[6], line_no, "head index");
        t.deprel = cols[7];
        cur.tokens.push_back(std::move(t));
        has_content = true;
    }
    flush();
    return sentences;
}

std::vector<Sentence> load_conllu(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot open conllu file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_conllu(buf.str(), path);
}

std::vector<Document> group_by_document(const std::vector<Sentence>& sentences) {
    bool any_marker = false;
    for (const auto& s : sentences)
        for (const auto& c : s.comments)
            if (c.rfind("# newdoc", 0) == 0) any_marker = true;

    std::vector<Document> docs;
    if (!any_marker) {
        for (size_t i = 0; i < sentences.size(); ++i)
            docs.push_back({std::to_string(i), {sentences[i]}});
        return docs;
    }
    for (const auto& s : sentences) {
        std::string new_id;
        bool starts_doc = false;
        for (const auto& c : s.comments) {
            if (c.rfind("# newdoc", 0) == 0) {
                starts_doc = true;
                auto eq = c.find('=');
                if (eq != std::string::npos) {
                    new_id = c.substr(eq + 1);
                    while (!new_id.empty() && new_id.front() == ' ') new_id.erase(new_id.begin());
                }
            }
        }
        if (starts_doc || docs.empty())
            docs.push_back({new_id.empty() ? std::to_string(docs.size()) : new_id, {}});
        docs.back().sentences.push_back(s);
    }
    return docs;
}

}  // namespace crosstask::conllu
