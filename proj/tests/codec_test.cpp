#include <gtest/gtest.h>

#include <random>

#include "support/expect.hpp"
#include "vouch/codec.hpp"
#include "vouch/error.hpp"
#include "vouch/keys.hpp"
#include "vouch/transaction.hpp"

using namespace vouch;

namespace {

const std::string kAlphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

Hash160 payload_from(std::mt19937_64& rng) {
  Hash160 p{};
  for (auto& b : p) b = static_cast<std::uint8_t>(rng());
  return p;
}

}  // namespace

// Published test vectors for the primitives.
TEST(Hashing, KnownVectors) {
  EXPECT_EQ(to_hex(sha256(as_bytes("abc"))), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(to_hex(ripemd160(as_bytes(""))), "9c1185a5c5e9fc54612808977ee8f548b2258d31");
  EXPECT_EQ(to_hex(ripemd160(as_bytes("abc"))), "8eb208f7e05d987a9b044a8e98c6b087f15a0bfc");
  EXPECT_EQ(to_hex(sha256d(as_bytes(""))), "5df6e0e2761359d30a8275058e299fcc0381534545f55cf43e41983f5d4c9456");
}

// Values below come from tests/oracle/address_oracle.py.
TEST(Hashing, Hash160MatchesOracle) {
  EXPECT_EQ(to_hex(hash160(as_bytes(""))), "b472a266d0bd89c13706a4132ccfb16f7c3b9fcb");
  EXPECT_EQ(to_hex(hash160(as_bytes("http://foo.bar"))), "225137392e02504f1fb29b43a0c8eb2409c9b681");
}

TEST(Base58Check, EncodeMatchesOracle) {
  Hash160 zero{};
  EXPECT_EQ(base58check_encode(0x00, zero), "1111111111111111111114oLvT2");
  Hash160 seq{};
  for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = static_cast<std::uint8_t>(i);
  EXPECT_EQ(base58check_encode(0x05, seq), "31h38a54tFMrR8kzBnP2241MFD2EUHtGha");
}

TEST(Base58Check, RejectsWrongPayloadLength) {
  Bytes short_payload(19, 0);
  EXPECT_ERRC(base58check_encode(0x00, short_payload), Errc::invalid_payload);
  Bytes long_payload(21, 0);
  EXPECT_ERRC(base58check_encode(0x00, long_payload), Errc::invalid_payload);
}

TEST(Base58Check, DecodeErrors) {
  EXPECT_ERRC(base58check_decode(""), Errc::malformed);
  EXPECT_ERRC(base58check_decode("148TGVNRVSvgCQsfqfzdfv5nG8uzjCd4P0"), Errc::malformed);
  EXPECT_ERRC(base58check_decode("1111"), Errc::malformed);
  EXPECT_ERRC(base58check_decode("148TGVNRVSvgCQsfqfzdfv5nG8uzjCd4PQ"), Errc::checksum);
}

TEST(Base58, LeadingZerosBecomeOnes) {
  EXPECT_EQ(base58_encode(Bytes{0, 0, 1}), "112");
  EXPECT_EQ(base58_decode("112"), (Bytes{0, 0, 1}));
  EXPECT_EQ(base58_encode(Bytes{}), "");
}

TEST(ServiceAddress, FooBar) {
  const Address a = derive_service_address("http://foo.bar");
  EXPECT_EQ(a.version, kServiceMarkerVersion);
  EXPECT_EQ(a.text(), "148TGVNRVSvgCQsfqfzdfv5nG8uzjCd4PP");
  EXPECT_EQ(base58check_decode(a.text()), a);
  EXPECT_TRUE(validate_address(a.text()).valid());
}

TEST(ServiceAddress, DistinctUrlsGiveDistinctMarkers) {
  EXPECT_EQ(derive_service_address("http://foo.baz").text(), "1EssDRHqzLw6nw755vTxeoRDnM8J22SXxu");
  EXPECT_NE(derive_service_address("http://foo.bar"), derive_service_address("http://foo.bar/"));
}

TEST(ServiceAddress, EmptyUrlRejected) {
  EXPECT_ERRC(derive_service_address(""), Errc::invalid_service);
}

TEST(ServiceAddress, IndistinguishableFromKeyHash) {
  const auto check = validate_address(derive_service_address("https://api.example.org/v1").text());
  EXPECT_EQ(check.kind, AddressClass::key_hash);
}

// The worked example address from the protocol write-up does not verify; the
// oracle agrees. Its version byte and payload still decode.
TEST(ValidateAddress, PublishedExampleFailsChecksum) {
  const auto check = validate_address("15VjRaDX3zpbA8PVnbrCAFzrVxN7ixHQ2C");
  EXPECT_EQ(check.kind, AddressClass::invalid);
  EXPECT_EQ(check.reason.rfind("checksum", 0), 0u);
}

TEST(ValidateAddress, Classes) {
  EXPECT_EQ(validate_address("31h38a54tFMrR8kzBnP2241MFD2EUHtGha").kind, AddressClass::script_hash);
  EXPECT_EQ(validate_address("1111111111111111111114oLvT2").kind, AddressClass::key_hash);
  const auto empty = validate_address("");
  EXPECT_FALSE(empty.valid());
  EXPECT_EQ(empty.reason.rfind("malformed", 0), 0u);
  Hash160 zero{};
  EXPECT_FALSE(validate_address(base58check_encode(0x42, zero)).valid());
}

TEST(Base58CheckProperty, RoundTripTenThousand) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10'000; ++i) {
    const auto version = static_cast<std::uint8_t>(rng());
    const Hash160 payload = payload_from(rng);
    const Address back = base58check_decode(base58check_encode(version, payload));
    ASSERT_EQ(back.version, version);
    ASSERT_EQ(back.payload, payload);
  }
}

TEST(Base58CheckProperty, SingleCharacterMutationsRejected) {
  std::mt19937_64 rng(11);
  int rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string text = base58check_encode(kKeyHashVersion, payload_from(rng));
    const std::size_t pos = rng() % text.size();
    char replacement;
    do {
      replacement = kAlphabet[rng() % kAlphabet.size()];
    } while (replacement == text[pos]);
    text[pos] = replacement;
    if (!validate_address(text).valid()) ++rejected;
  }
  EXPECT_GE(rejected, 999);
}

TEST(Hex, RoundTripAndErrors) {
  EXPECT_EQ(to_hex(from_hex("00ff10")), "00ff10");
  EXPECT_ERRC(from_hex("abc"), Errc::parse_error);
  EXPECT_ERRC(from_hex("zz"), Errc::parse_error);
  EXPECT_ERRC(array_from_hex<20>("00"), Errc::parse_error);
}

TEST(Keys, SeedDeterminesKey) {
  const Seed seed = seed_from_label("alice");
  const KeyPair a = KeyPair::from_seed(seed);
  const KeyPair b = KeyPair::from_seed(seed);
  EXPECT_EQ(a.public_key(), b.public_key());
  EXPECT_EQ(a.id(), key_id(a.public_key()));
  const auto sig = a.sign(as_bytes("msg"));
  EXPECT_TRUE(verify(sig, as_bytes("msg"), a.public_key()));
  EXPECT_FALSE(verify(sig, as_bytes("msh"), a.public_key()));
  EXPECT_FALSE(verify(sig, as_bytes("msg"), KeyPair::from_seed(seed_from_label("bob")).public_key()));
}

TEST(Serialization, TxidIgnoresSignaturesButNotOutputOrder) {
  const KeyPair k = KeyPair::from_seed(seed_from_label("k"));
  Transaction tx;
  tx.inputs.push_back(TxIn{OutPoint{TxId{sha256(as_bytes("prev"))}, 1}, {}});
  tx.outputs.push_back(TxOut{Amount(5), PayToKeyHash{k.id()}});
  tx.outputs.push_back(TxOut{Amount(0), Marker{derive_service_address("http://foo.bar").payload}});
  const TxId before = txid(tx);
  EXPECT_EQ(canonical_serialize(tx), canonical_serialize(tx));

  Transaction signed_tx = tx;
  signed_tx.inputs[0].signatures.push_back(InputSignature{k.public_key(), k.sign(signature_hash(tx, 0))});
  EXPECT_EQ(txid(signed_tx), before);
  EXPECT_NE(serialize_with_signatures(signed_tx), serialize_with_signatures(tx));

  Transaction swapped = tx;
  std::swap(swapped.outputs[0], swapped.outputs[1]);
  EXPECT_NE(txid(swapped), before);

  Transaction relocked = tx;
  relocked.outputs[1].lock = PayToKeyHash{derive_service_address("http://foo.bar").payload};
  EXPECT_NE(txid(relocked), before);
}

TEST(Serialization, SignatureHashCommitsToInputIndex) {
  Transaction tx;
  tx.inputs.push_back(TxIn{OutPoint{TxId{}, 0}, {}});
  tx.inputs.push_back(TxIn{OutPoint{TxId{}, 1}, {}});
  tx.outputs.push_back(TxOut{Amount(1), PayToKeyHash{}});
  EXPECT_NE(signature_hash(tx, 0), signature_hash(tx, 1));
}
