#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "sipauth/rng.hpp"
#include "sipauth/sha256.hpp"

using namespace sipauth;

namespace {

std::vector<uint8_t> from_hex(const std::string& hex) {
    std::vector<uint8_t> out;
    for (size_t i = 0; i < hex.size(); i += 2) {
        out.push_back(static_cast<uint8_t>(std::stoul(hex.substr(i, 2), nullptr, 16)));
    }
    return out;
}

}  // namespace

// Known-answer vectors: FIPS 180-4 examples plus short-message cases,
// expected values frozen from an independent validated implementation.
TEST_CASE("known-answer vectors") {
    struct Vector {
        std::vector<uint8_t> msg;
        const char* digest;
    };
    std::vector<Vector> vectors;
    auto text = [](const char* s) {
        return std::vector<uint8_t>(s, s + std::string(s).size());
    };
    vectors.push_back({{}, "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"});
    vectors.push_back(
        {text("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"});
    vectors.push_back({text("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"),
                       "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1"});
    vectors.push_back({text("abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmnhijklmno"
                            "ijklmnopjklmnopqklmnopqrlmnopqrsmnopqrstnopqrstu"),
                       "cf5b16a778af8380036ce59e7b0492370b249b11e8f07a51afac45037afee9d1"});
    vectors.push_back(
        {from_hex("d3"), "28969cdfa74a12c82f3bad960b0b000aca2ac329deea5c2328ebc6f2ba9802c1"});
    vectors.push_back(
        {from_hex("11af"), "5ca7133fa735326081558ac312c620eeca9970d1e70a4b95533d956f072d1f98"});
    vectors.push_back(
        {from_hex("b4190e"), "dff2e73091f6c05e528896c4c831b9448653dc2ff043528f6769437bc7b975c2"});
    vectors.push_back({from_hex("74ba2521"),
                       "b16aa56be3880d18cd41e68384cf1ec8c17680c45a02b1575dc1518923ae8b0e"});
    vectors.push_back({from_hex("c299209682"),
                       "f0887fe961c9cd3beab957e8222494abb969b1ce4c6557976df8b0f6d20e9166"});
    vectors.push_back({from_hex("e1dc724d5621"),
                       "eca0a060b489636225b4fa64d267dabbe44273067ac679f20820bddc6b6a90ac"});
    vectors.push_back({from_hex("06e076f5a442d5"),
                       "3fd877e27450e6bbd5d74bb82f9870c64c66e109418baa8e6bbcff355e287926"});
    vectors.push_back({from_hex("5738c929c4f4ccb6"),
                       "963bb88f27f512777aab6c8b1a02c70ec0ad651d428f870036e1917120fb48bf"});
    vectors.push_back({text("The quick brown fox jumps over the lazy dog"),
                       "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592"});

    // Padding boundary lengths 55/56/64/65.
    auto counting = [](size_t n) {
        std::vector<uint8_t> v(n);
        std::iota(v.begin(), v.end(), static_cast<uint8_t>(0));
        return v;
    };
    vectors.push_back({counting(55),
                       "463eb28e72f82e0a96c0a4cc53690c571281131f672aa229e0d45ae59b598b59"});
    vectors.push_back({counting(56),
                       "da2ae4d6b36748f2a318f23e7ab1dfdf45acdc9d049bd80e59de82a60895f562"});
    vectors.push_back({counting(64),
                       "fdeab9acf3710362bd2658cdc9a29e8f9c757fcf9811603a8c447cd1d9151108"});
    vectors.push_back({counting(65),
                       "4bfd2c8b6f1eec7a2afeb48b934ee4b2694182027e6d0fc075074f2fabb31781"});

    for (const auto& v : vectors) {
        CAPTURE(v.digest);
        CHECK(sha256(v.msg).hex() == v.digest);
    }

    // One million repetitions of 'a'.
    const std::vector<uint8_t> chunk(1000, 'a');
    Sha256 hasher;
    for (int i = 0; i < 1000; ++i) {
        hasher.update(chunk);
    }
    CHECK(hasher.finalize().hex() ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("streaming in arbitrary pieces matches one-shot hashing") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        const auto data = random_bytes(rng, uniform_below(rng, 300));
        const Digest256 ref = sha256(data);
        Sha256 hasher;
        size_t pos = 0;
        while (pos < data.size()) {
            const size_t take = 1 + uniform_below(rng, data.size() - pos);
            hasher.update(std::span<const uint8_t>(data.data() + pos, take));
            pos += take;
        }
        CHECK(hasher.finalize() == ref);
    }
}

TEST_CASE("hashing the same input twice is deterministic") {
    const auto data = std::string("determinism probe");
    CHECK(sha256(data) == sha256(data));
}

TEST_CASE("avalanche: one flipped input bit moves about half the digest") {
    std::mt19937_64 rng(13);
    const int trials = 1000;
    double total_hd = 0;
    for (int t = 0; t < trials; ++t) {
        auto data = random_bytes(rng, 1 + uniform_below(rng, 128));
        const Digest256 before = sha256(data);
        const uint64_t bit = uniform_below(rng, data.size() * 8);
        data[bit / 8] ^= static_cast<uint8_t>(0x80u >> (bit % 8));
        total_hd += static_cast<double>(hamming(before, sha256(data)));
    }
    const double mean = total_hd / trials;
    CHECK(mean > 123.0);
    CHECK(mean < 133.0);
}

TEST_CASE("digest hex round trip") {
    const Digest256 d = sha256(std::string("abc"));
    CHECK(Digest256::from_hex(d.hex()) == d);
}
