#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace mosr {

enum class VocabMode { word, chars };

const char* to_string(VocabMode mode);
VocabMode vocab_mode_from_string(const std::string& s);

// Token <-> id bijection. Word mode reserves <unk> and <eos>; char mode maps
// every distinct character (UTF-8 codepoint) and injects no specials.
struct Vocabulary {
    VocabMode mode = VocabMode::word;
    std::vector<std::string> id_to_token;
    std::unordered_map<std::string, std::int32_t> token_to_id;
    std::int32_t unk_id = -1;
    std::int32_t eos_id = -1;

    std::size_t size() const { return id_to_token.size(); }
    bool contains(const std::string& token) const { return token_to_id.count(token) != 0; }
};

struct TokenStream {
    std::vector<std::int32_t> ids;
    std::size_t vocab_size = 0;
};

// Word mode: whitespace tokens per line, each line closed with <eos>; the
// most frequent max_size-2 tokens are kept (ties broken lexicographically)
// and everything else maps to <unk>. Char mode: every distinct codepoint is
// a token, ids in lexicographic order; max_size is not applied.
Vocabulary build_vocab(const std::string& text, VocabMode mode, std::size_t max_size);

TokenStream encode(const std::string& text, const Vocabulary& vocab);
std::string decode(const TokenStream& stream, const Vocabulary& vocab);

// One token per line in id order after a "mode=<word|char> size=<M>" header.
// Backslash, newline, CR and tab inside tokens are backslash-escaped so that
// char-mode tokens stay one per line.
void save_vocab(const Vocabulary& vocab, std::ostream& out);
Vocabulary load_vocab(std::istream& in);
void save_vocab_file(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocab_file(const std::string& path);

// Continuous-stream batching for truncated BPTT: the stream is cut into
// batch_size contiguous rows and consumed in windows of bptt_len, targets
// one step ahead of inputs. Consecutive windows of a row are contiguous in
// the source text, so hidden state can carry across windows.
class Batches {
public:
    Batches(const TokenStream& stream, std::size_t batch_size, std::size_t bptt_len);

    std::size_t batch_size() const { return batch_size_; }
    std::size_t bptt_len() const { return bptt_len_; }
    std::size_t num_windows() const { return num_windows_; }
    // Length of each of the batch_size parallel rows.
    std::size_t row_len() const { return row_len_; }

    struct Window {
        std::vector<std::vector<std::int32_t>> inputs;   // batch_size x bptt_len
        std::vector<std::vector<std::int32_t>> targets;  // batch_size x bptt_len
    };
    Window window(std::size_t w) const;

private:
    std::size_t batch_size_;
    std::size_t bptt_len_;
    std::size_t row_len_;
    std::size_t num_windows_;
    std::vector<std::vector<std::int32_t>> rows_;
};

std::string read_text_file(const std::string& path);

}  // namespace mosr
