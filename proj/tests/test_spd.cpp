#include <doctest.h>

#include <vector>

#include "trrsim/error.hpp"
#include "trrsim/spd.hpp"

using namespace trrsim;

TEST_CASE("decode_mac_byte: value nibbles") {
  CHECK(decode_mac_byte(0b1000).value == MacValue{MacUnlimited{}});
  CHECK(decode_mac_byte(0b0000).value == MacValue{MacUntested{}});
  CHECK(decode_mac_byte(0b0011).value == MacValue{MacLimit{400'000}});
  for (std::uint8_t v = 1; v <= 6; ++v)
    CHECK(decode_mac_byte(v).value == MacValue{MacLimit{100'000u * (v + 1)}});
  CHECK(decode_mac_byte(0x80).ptrr_flag);
  CHECK(!decode_mac_byte(0x08).ptrr_flag);
}

TEST_CASE("decode_mac_byte: undefined nibbles") {
  for (std::uint8_t v : {0b0111, 0b1001, 0b1010, 0b1011, 0b1100, 0b1101, 0b1110, 0b1111})
    CHECK_THROWS_AS(decode_mac_byte(v), DecodeError);
}

TEST_CASE("encode_mac") {
  CHECK(encode_mac({MacUnlimited{}, 0, true}) == 0b1000'1000);
  CHECK(encode_mac({MacUntested{}, 0, false}) == 0x00);
  for (bool flag : {false, true}) {
    for (const MacValue& v : std::vector<MacValue>{MacUntested{}, MacUnlimited{}, MacLimit{200'000}, MacLimit{300'000},
                                                   MacLimit{400'000}, MacLimit{500'000}, MacLimit{600'000},
                                                   MacLimit{700'000}}) {
      const MacField f{v, 0, flag};
      CHECK(decode_mac_byte(encode_mac(f)) == f);
    }
  }
  CHECK_THROWS_AS(encode_mac({MacLimit{250'000}, 0, true}), ConfigError);
}

TEST_CASE("codec is bijective over the defined bytes") {
  int defined = 0;
  for (int b = 0; b < 256; ++b) {
    const auto byte = static_cast<std::uint8_t>(b);
    if (is_defined_mac_byte(byte)) {
      ++defined;
      CHECK(encode_mac(decode_mac_byte(byte)) == byte);
    } else {
      CHECK_THROWS_AS(decode_mac_byte(byte), DecodeError);
    }
  }
  CHECK(defined == 16);
}

TEST_CASE("decode_mac reads the generation's byte") {
  CHECK(mac_byte_offset(DdrGeneration::ddr3) == 41);
  CHECK(mac_byte_offset(DdrGeneration::ddr4) == 7);
  std::vector<std::uint8_t> spd(256, 0);
  spd[41] = 0x88;
  spd[7] = 0x03;
  CHECK(decode_mac(spd, DdrGeneration::ddr3).value == MacValue{MacUnlimited{}});
  CHECK(decode_mac(spd, DdrGeneration::ddr4).value == MacValue{MacLimit{400'000}});
  const std::vector<std::uint8_t> short_dump(8, 0);
  CHECK_THROWS_AS(decode_mac(short_dump, DdrGeneration::ddr3), DecodeError);
}

TEST_CASE("classify_compliance") {
  CHECK(classify_compliance({MacUnlimited{}, 0, true}) == Compliance::ptrr_compliant);
  CHECK(classify_compliance({MacLimit{300'000}, 0, false}) == Compliance::trr_compliant);
  CHECK(classify_compliance({MacLimit{200'000}, 0, true}) == Compliance::non_compliant);
  CHECK(classify_compliance({MacUntested{}, 0, true}) == Compliance::non_compliant);
}

TEST_CASE("describe_spd") {
  std::vector<std::uint8_t> spd(256, 0);
  spd[7] = 0x88;
  const auto doc = describe_spd(spd, DdrGeneration::ddr4);
  CHECK(doc["generation"] == "ddr4");
  CHECK(doc["mac"] == "unlimited");
  CHECK(doc["tmaw"] == 0);
  CHECK(doc["ptrr_flag"] == true);
  CHECK(doc["compliance"] == "ptrr_compliant");
}
