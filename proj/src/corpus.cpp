#include "mosr/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "mosr/errors.hpp"

namespace mosr {

const char* to_string(VocabMode mode) { return mode == VocabMode::word ? "word" : "char"; }

VocabMode vocab_mode_from_string(const std::string& s) {
    if (s == "word") return VocabMode::word;
    if (s == "char") return VocabMode::chars;
    throw contract_error("unknown vocab mode: " + s);
}

namespace {

constexpr const char* kUnk = "<unk>";
constexpr const char* kEos = "<eos>";

// Split UTF-8 text into codepoint strings. Continuation bytes are folded
// into the preceding lead byte; malformed bytes pass through singly.
std::vector<std::string> split_codepoints(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto lead = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        if (lead >= 0xF0)
            len = 4;
        else if (lead >= 0xE0)
            len = 3;
        else if (lead >= 0xC0)
            len = 2;
        len = std::min(len, text.size() - i);
        out.push_back(text.substr(i, len));
        i += len;
    }
    return out;
}

// Word-mode token sequence: whitespace-separated tokens, <eos> after each
// line (including a final line not ending in '\n').
std::vector<std::string> word_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream words(line);
        std::string token;
        while (words >> token) out.push_back(token);
        out.push_back(kEos);
    }
    return out;
}

std::string escape_token(const std::string& token) {
    std::string out;
    for (char c : token) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unescape_token(const std::string& line) {
    std::string out;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] != '\\' || i + 1 == line.size()) {
            out += line[i];
            continue;
        }
        ++i;
        switch (line[i]) {
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case 't': out += '\t'; break;
            default: throw format_error("vocab file: bad escape \\" + std::string(1, line[i]));
        }
    }
    return out;
}

}  // namespace

Vocabulary build_vocab(const std::string& text, VocabMode mode, std::size_t max_size) {
    if (text.empty()) throw contract_error("build_vocab: empty text");

    Vocabulary vocab;
    vocab.mode = mode;

    if (mode == VocabMode::chars) {
        std::map<std::string, bool> seen;  // ordered: lexicographic ids
        for (const auto& cp : split_codepoints(text)) seen[cp] = true;
        for (const auto& [token, _] : seen) {
            vocab.token_to_id.emplace(token, static_cast<std::int32_t>(vocab.id_to_token.size()));
            vocab.id_to_token.push_back(token);
        }
        return vocab;
    }

    if (max_size < 2) throw contract_error("build_vocab: word mode needs max_size >= 2");

    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& token : word_tokens(text)) {
        if (token != kUnk && token != kEos) ++freq[token];
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > max_size - 2) ranked.resize(max_size - 2);

    auto add = [&vocab](const std::string& token) {
        vocab.token_to_id.emplace(token, static_cast<std::int32_t>(vocab.id_to_token.size()));
        vocab.id_to_token.push_back(token);
    };
    add(kUnk);
    add(kEos);
    vocab.unk_id = 0;
    vocab.eos_id = 1;
    for (const auto& [token, _] : ranked) add(token);
    return vocab;
}

TokenStream encode(const std::string& text, const Vocabulary& vocab) {
    TokenStream stream;
    stream.vocab_size = vocab.size();
    if (vocab.mode == VocabMode::word) {
        for (const auto& token : word_tokens(text)) {
            auto it = vocab.token_to_id.find(token);
            stream.ids.push_back(it != vocab.token_to_id.end() ? it->second : vocab.unk_id);
        }
    } else {
        for (const auto& cp : split_codepoints(text)) {
            auto it = vocab.token_to_id.find(cp);
            if (it == vocab.token_to_id.end()) {
                throw contract_error("encode: character not in vocabulary: '" + cp + "'");
            }
            stream.ids.push_back(it->second);
        }
    }
    return stream;
}

std::string decode(const TokenStream& stream, const Vocabulary& vocab) {
    std::string out;
    if (vocab.mode == VocabMode::chars) {
        for (auto id : stream.ids) out += vocab.id_to_token.at(id);
        return out;
    }
    bool line_start = true;
    for (auto id : stream.ids) {
        const std::string& token = vocab.id_to_token.at(id);
        if (id == vocab.eos_id) {
            out += '\n';
            line_start = true;
            continue;
        }
        if (!line_start) out += ' ';
        out += token;
        line_start = false;
    }
    return out;
}

void save_vocab(const Vocabulary& vocab, std::ostream& out) {
    out << "mode=" << to_string(vocab.mode) << " size=" << vocab.size() << '\n';
    for (const auto& token : vocab.id_to_token) out << escape_token(token) << '\n';
}

Vocabulary load_vocab(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw format_error("vocab file: missing header");
    std::size_t mode_pos = header.find("mode=");
    std::size_t size_pos = header.find(" size=");
    if (mode_pos != 0 || size_pos == std::string::npos) {
        throw format_error("vocab file: bad header '" + header + "'");
    }
    Vocabulary vocab;
    vocab.mode = vocab_mode_from_string(header.substr(5, size_pos - 5));
    const std::size_t size = std::stoul(header.substr(size_pos + 6));
    std::string line;
    while (vocab.id_to_token.size() < size && std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string token = unescape_token(line);
        vocab.token_to_id.emplace(token, static_cast<std::int32_t>(vocab.id_to_token.size()));
        vocab.id_to_token.push_back(token);
    }
    if (vocab.id_to_token.size() != size) {
        throw format_error("vocab file: truncated, expected " + std::to_string(size) +
                           " tokens, got " + std::to_string(vocab.id_to_token.size()));
    }
    if (vocab.mode == VocabMode::word) {
        auto unk = vocab.token_to_id.find("<unk>");
        auto eos = vocab.token_to_id.find("<eos>");
        if (unk == vocab.token_to_id.end() || eos == vocab.token_to_id.end()) {
            throw format_error("vocab file: word mode must contain <unk> and <eos>");
        }
        vocab.unk_id = unk->second;
        vocab.eos_id = eos->second;
    }
    return vocab;
}

void save_vocab_file(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw format_error("cannot open for writing: " + path);
    save_vocab(vocab, out);
}

Vocabulary load_vocab_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open for reading: " + path);
    return load_vocab(in);
}

Batches::Batches(const TokenStream& stream, std::size_t batch_size, std::size_t bptt_len)
    : batch_size_(batch_size), bptt_len_(bptt_len) {
    if (batch_size == 0 || bptt_len == 0) {
        throw contract_error("Batches: batch_size and bptt_len must be positive");
    }
    if (stream.ids.size() < batch_size * (bptt_len + 1)) {
        throw contract_error("Batches: stream of " + std::to_string(stream.ids.size()) +
                             " tokens too short for batch_size " + std::to_string(batch_size) +
                             " x bptt " + std::to_string(bptt_len));
    }
    row_len_ = stream.ids.size() / batch_size;
    num_windows_ = (row_len_ - 1) / bptt_len;
    rows_.resize(batch_size);
    for (std::size_t b = 0; b < batch_size; ++b) {
        const auto begin = stream.ids.begin() + static_cast<std::ptrdiff_t>(b * row_len_);
        rows_[b].assign(begin, begin + static_cast<std::ptrdiff_t>(row_len_));
    }
}

Batches::Window Batches::window(std::size_t w) const {
    if (w >= num_windows_) {
        throw contract_error("Batches::window: index " + std::to_string(w) + " out of " +
                             std::to_string(num_windows_));
    }
    Window win;
    win.inputs.resize(batch_size_);
    win.targets.resize(batch_size_);
    const std::size_t start = w * bptt_len_;
    for (std::size_t b = 0; b < batch_size_; ++b) {
        win.inputs[b].assign(rows_[b].begin() + static_cast<std::ptrdiff_t>(start),
                             rows_[b].begin() + static_cast<std::ptrdiff_t>(start + bptt_len_));
        win.targets[b].assign(rows_[b].begin() + static_cast<std::ptrdiff_t>(start + 1),
                              rows_[b].begin() + static_cast<std::ptrdiff_t>(start + bptt_len_ + 1));
    }
    return win;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace mosr
