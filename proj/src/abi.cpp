#include "hammer/abi.hpp"

#include "hammer/keccak.hpp"

namespace hammer {

Selector function_selector(std::string_view signature) {
    const Hash32 digest = keccak256(signature);
    return Selector{digest[0], digest[1], digest[2], digest[3]};
}

std::vector<uint8_t> encode_call(const Selector& selector, std::span<const Word32> args) {
    std::vector<uint8_t> out;
    out.reserve(4 + 32 * args.size());
    out.insert(out.end(), selector.begin(), selector.end());
    for (const auto& word : args) {
        out.insert(out.end(), word.begin(), word.end());
    }
    return out;
}

std::vector<uint8_t> encode_call(const Selector& selector, std::initializer_list<uint64_t> args) {
    std::vector<Word32> words;
    words.reserve(args.size());
    for (uint64_t v : args) words.push_back(word_from_u64(v));
    return encode_call(selector, words);
}

const Selector& set_item_selector() {
    static const Selector sel = function_selector(kSetItemSignature);
    return sel;
}

const Selector& get_item_selector() {
    static const Selector sel = function_selector(kGetItemSignature);
    return sel;
}

}  // namespace hammer
