#include "doctest.h"

#include "permledger/chain_params.hpp"
#include "permledger/codec.hpp"
#include "permledger/crypto.hpp"
#include "permledger/identity.hpp"
#include "support.hpp"

using namespace permledger;
using testsupport::Gen;

namespace {

Bytes hex(std::string_view s) { return from_hex(s); }

template <std::size_t N>
std::array<std::uint8_t, N> hex_array(std::string_view s) {
  return to_array<N>(from_hex(s));
}

}  // namespace

TEST_CASE("hex round trip and rejects malformed input") {
  Gen gen(1);
  for (int i = 0; i < 200; ++i) {
    auto b = gen.bytes(gen.between(0, 40));
    CHECK(from_hex(to_hex(b)) == b);
  }
  CHECK(to_hex(Bytes{0x00, 0xab, 0xff}) == "00abff");
  CHECK_THROWS_AS(from_hex("abc"), Error);
  CHECK_THROWS_AS(from_hex("zz"), Error);
}

TEST_CASE("contains_subsequence agrees with a naive scan") {
  Gen gen(2);
  for (int i = 0; i < 300; ++i) {
    auto hay = gen.bytes(gen.between(0, 60));
    for (auto& b : hay) b %= 3;
    auto needle = gen.bytes(gen.between(0, 4));
    for (auto& b : needle) b %= 3;
    bool naive = needle.empty();
    for (std::size_t at = 0; !naive && at + needle.size() <= hay.size(); ++at) {
      naive = std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(at));
    }
    CHECK(contains_subsequence(hay, needle) == naive);
  }
}

TEST_CASE("codec writer and reader are inverse") {
  Gen gen(3);
  for (int i = 0; i < 100; ++i) {
    const auto a = static_cast<std::uint32_t>(gen.next());
    const auto b = gen.next();
    const auto blob = gen.bytes(gen.between(0, 100));
    const auto text = gen.word(0, 20);
    Writer w;
    w.u8(7);
    w.u32(a);
    w.u64(b);
    w.bytes(blob);
    w.str(text);
    w.boolean(true);
    const auto data = w.take();
    Reader r(data);
    CHECK(r.u8() == 7);
    CHECK(r.u32() == a);
    CHECK(r.u64() == b);
    CHECK(r.bytes() == blob);
    CHECK(r.str() == text);
    CHECK(r.boolean());
    CHECK(r.done());
  }
}

TEST_CASE("codec reader rejects truncation and trailing data") {
  Writer w;
  w.str("hello");
  auto data = w.take();
  for (std::size_t cut = 0; cut < data.size(); ++cut) {
    Reader r(ByteView(data).first(cut));
    CHECK_THROWS_AS(r.str(), Error);
  }
  data.push_back(0);
  Reader r(data);
  r.str();
  CHECK_THROWS_AS(r.expect_done(), Error);
}

TEST_CASE("sha256 and hkdf match published vectors") {
  CHECK(to_hex(crypto::sha256(as_bytes("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(crypto::sha256(as_bytes("ab"), as_bytes("c")) == crypto::sha256(as_bytes("abc")));
  auto okm = crypto::hkdf_sha256(Bytes(22, 0x0b), hex("000102030405060708090a0b0c"), hex("f0f1f2f3f4f5f6f7f8f9"), 42);
  CHECK(to_hex(okm) == "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf34007208d5b887185865");
}

TEST_CASE("ed25519 matches the RFC 8032 empty-message vector") {
  auto key = crypto::SigningKey::from_seed(
      hex_array<32>("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60"));
  CHECK(to_hex(key.public_key()) == "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  auto sig = key.sign({});
  CHECK(to_hex(sig) ==
        "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
  CHECK(crypto::verify_signature(key.public_key(), {}, sig));
  sig[10] ^= 1;
  CHECK_FALSE(crypto::verify_signature(key.public_key(), {}, sig));
  CHECK_FALSE(crypto::verify_signature(key.public_key(), {}, ByteView(sig).first(63)));
}

TEST_CASE("signature check fails for any single-bit change of the message") {
  auto id = testsupport::identity("sig");
  const auto msg = Bytes(48, 0x5a);
  const auto sig = id.sign(msg);
  CHECK(verify_signed_by(id.address(), id.public_key(), msg, sig));
  for (std::size_t i = 0; i < msg.size(); ++i) {
    auto m = msg;
    m[i] ^= 0x10;
    CHECK_FALSE(crypto::verify_signature(id.public_key(), m, sig));
  }
  auto other = testsupport::identity("other");
  CHECK_FALSE(verify_signed_by(other.address(), id.public_key(), msg, sig));
}

TEST_CASE("x25519 matches the RFC 7748 vector") {
  auto alice = crypto::AgreementKey::from_seed(
      hex_array<32>("77076d0a7318a57d3c16c17251b26645df4c2f87ebc0992ab177fba51db92c2a"));
  auto bob = crypto::AgreementKey::from_seed(
      hex_array<32>("5dab087e624a8a4b79e17f8b83800ee66f3bb1292618b6fd1c2f8b27ff88e0eb"));
  CHECK(to_hex(alice.public_key()) == "8520f0098930a754748b7ddcb43ef75a0dbf3a0d26381af4eba4a98eaa9b4e6a");
  CHECK(to_hex(bob.public_key()) == "de9edb7d7b7dc1b4d35b61c2ece435373f8343c85b78674dadfc7e146f882b4f");
  CHECK(to_hex(alice.agree(bob.public_key())) == "4a5d9d5ba4ce2de1728e3bf480350f25e07e21c947d19e3376f09b3c1e161742");
  CHECK(alice.agree(bob.public_key()) == bob.agree(alice.public_key()));
}

TEST_CASE("aes-256-gcm matches the zero-key vector and detects tampering") {
  crypto::SymmetricKey key{};
  const Bytes nonce(12, 0);
  auto sealed = crypto::aead_seal(key, nonce, {}, Bytes(16, 0));
  CHECK(to_hex(sealed) == "cea7403d4d606b6e074ec5d3baf39d18d0d1c8a799996bf0265b98b5d48ab919");
  CHECK(crypto::aead_open(key, nonce, {}, sealed) == Bytes(16, 0));
  for (std::size_t i = 0; i < sealed.size(); ++i) {
    auto bad = sealed;
    bad[i] ^= 0x01;
    CHECK_FALSE(crypto::aead_open(key, nonce, {}, bad).has_value());
  }
  CHECK_FALSE(crypto::aead_open(key, nonce, as_bytes("aad"), sealed).has_value());
}

TEST_CASE("base58 vectors and round trip") {
  CHECK(crypto::base58_encode(as_bytes("Hello World!")) == "2NEpo7TZRRrLZSi2U");
  CHECK(crypto::base58_encode(Bytes{0, 0, 1}) == "112");
  CHECK(crypto::base58_encode({}).empty());
  CHECK_FALSE(crypto::base58_decode("0OIl").has_value());
  Gen gen(5);
  for (int i = 0; i < 200; ++i) {
    auto b = gen.bytes(gen.between(0, 30));
    if (gen.chance(0.3) && !b.empty()) b[0] = 0;
    CHECK(crypto::base58_decode(crypto::base58_encode(b)) == b);
  }
}

TEST_CASE("address derivation is base58check over a 160-bit key digest") {
  auto id = testsupport::identity("addr");
  auto digest = crypto::sha256(crypto::sha256(id.public_key()));
  Bytes payload{0x00};
  payload.insert(payload.end(), digest.begin(), digest.begin() + 20);
  auto check = crypto::sha256(crypto::sha256(payload));
  payload.insert(payload.end(), check.begin(), check.begin() + 4);
  CHECK(id.address().str() == crypto::base58_encode(payload));
  CHECK(Address::parse(id.address().str()) == id.address());
  auto s = id.address().str();
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto t = s;
    t[i] = t[i] == '2' ? '3' : '2';
    CHECK_FALSE(Address::parse(t).has_value());
  }
  CHECK_THROWS_AS(Address::parse_or_throw("nope"), Error);
}

TEST_CASE("identities are deterministic per seed and rotation keeps the address") {
  auto a = NodeIdentity::generate(as_bytes("seed-1"));
  auto b = NodeIdentity::generate(as_bytes("seed-1"));
  auto c = NodeIdentity::generate(as_bytes("seed-2"));
  CHECK(a.address() == b.address());
  CHECK(a.wrap_public_key() == b.wrap_public_key());
  CHECK(a.address() != c.address());
  CHECK(NodeIdentity::generate().address() != NodeIdentity::generate().address());
  auto r = a.with_rotated_wrap_key();
  CHECK(r.address() == a.address());
  CHECK(r.wrap_public_key() != a.wrap_public_key());
  CHECK(r.wrap_generation() == 1);
  CHECK(NodeIdentity::from_master_seed(a.master_seed(), 1).wrap_public_key() == r.wrap_public_key());
}

TEST_CASE("chain params parse the reference file") {
  auto p = ChainParams::parse(testsupport::read_file(std::filesystem::path(PERMLEDGER_TEST_DATA) / "model.conf"));
  CHECK(p.protocol_tag == "multichain");
  CHECK(p.description == "MultiChain model");
  CHECK(p.root_stream_name == "root");
  CHECK(p.root_stream_open);
  CHECK(p.target_block_time == 15);
  CHECK(p.max_block_size == 8388608);
  CHECK_FALSE(p.anyone_can_connect);
  CHECK(p.anyone_can_receive_empty);
  CHECK(p.miner_precheck);
  CHECK(p == ChainParams{});
  CHECK(ChainParams::parse(p.to_text()) == p);
}

TEST_CASE("chain params reject bad input naming the key") {
  auto fails_on = [](std::string_view text, std::string_view key) {
    try {
      ChainParams::parse(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidParams);
      CHECK(std::string(e.what()).find(key) != std::string::npos);
      return;
    }
    FAIL("accepted: " << text);
  };
  fails_on("target-block-time = 4\n", "target-block-time");
  fails_on("target-block-time = 86401\n", "target-block-time");
  fails_on("maximum-block-size = 999\n", "maximum-block-size");
  fails_on("anyone-can-connect = yes\n", "anyone-can-connect");
  fails_on("no-such-key = 1\n", "no-such-key");
  fails_on("target-block-time = 10\ntarget-block-time = 11\n", "target-block-time");
}

TEST_CASE("chain params boundaries are inclusive") {
  CHECK(ChainParams::parse("target-block-time = 5\n").target_block_time == 5);
  CHECK(ChainParams::parse("target-block-time = 86400\n").target_block_time == 86400);
  CHECK(ChainParams::parse("maximum-block-size = 1000\n").max_block_size == 1000);
  CHECK(ChainParams::parse("maximum-block-size = 1000000000\n").max_block_size == 1000000000);
}
