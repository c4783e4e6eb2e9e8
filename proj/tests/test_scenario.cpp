#include <gtest/gtest.h>

#include "airtime/scenario.hpp"
#include "test_helpers.hpp"

using namespace airtime;

namespace {

ErrorCategory
category_of(const std::string& text)
{
  try
  {
    load_scenario_text(text);
  }
  catch (const Error& e)
  {
    return e.category();
  }
  return ErrorCategory::internal;
}

std::string
message_of(const std::string& text)
{
  try
  {
    load_scenario_text(text);
  }
  catch (const Error& e)
  {
    return e.what();
  }
  return {};
}

const char* kMinimal = R"({"stations":[{"phy_rate_mbps":144.4,"flows":[{"kind":"udp_cbr","rate_mbps":10}]}]})";

} // namespace

TEST(Scenario, MinimalDocumentUsesDefaults)
{
  const auto s = load_scenario_text(kMinimal);
  EXPECT_EQ(s.schema_version, 1);
  EXPECT_EQ(s.scheme, Scheme::airtime_fair_fq);
  EXPECT_EQ(s.duration, 30);
  ASSERT_EQ(s.stations.size(), 1u);
  EXPECT_EQ(s.stations[0].name, "sta0");
  EXPECT_EQ(s.config, SimConfig{});
}

TEST(Scenario, PingDefaultsToSmallPackets)
{
  const auto s = load_scenario_text(R"({"stations":[{"phy_rate_mbps":1,"flows":[{"kind":"ping"}]}]})");
  EXPECT_EQ(s.stations[0].flows[0].packet_size, 64u);
}

TEST(Scenario, ZeroDurationRejected)
{
  auto s = testutil::three_station_udp(Scheme::fifo, 0);
  EXPECT_THROW(validate(s), Error);
  EXPECT_EQ(category_of(R"({"duration":0,"stations":[{"phy_rate_mbps":1,"flows":[]}]})"), ErrorCategory::validation);
}

TEST(Scenario, UnknownSchemeListsValidOnes)
{
  const auto msg = message_of(R"({"scheme":"wfq","stations":[{"phy_rate_mbps":1}]})");
  for (const char* name : {"fifo", "fq_codel", "fq_mac", "airtime_fair_fq"})
    EXPECT_NE(msg.find(name), std::string::npos) << msg;
}

TEST(Scenario, EmptyStationListRejected)
{
  EXPECT_EQ(category_of(R"({"stations":[]})"), ErrorCategory::validation);
  EXPECT_EQ(category_of(R"({})"), ErrorCategory::validation);
}

TEST(Scenario, ErrorsNameTheField)
{
  EXPECT_NE(message_of(R"({"stations":[{"phy_rate_mbps":1,"flows":[{"kind":"udp_cbr","rate":5}]}]})")
              .find("scenario.stations[0].flows[0]: unknown key 'rate'"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"stations":[{"phy_rate_mbps":"fast"}]})").find("scenario.stations[0].phy_rate_mbps"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"config":{"fifo_limit":-3},"stations":[{"phy_rate_mbps":1}]})").find("fifo_limit"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"config":{"sparse_optimisation":1},"stations":[{"phy_rate_mbps":1}]})")
              .find("sparse_optimisation"),
            std::string::npos);
}

TEST(Scenario, FlowRules)
{
  EXPECT_NE(message_of(R"({"stations":[{"phy_rate_mbps":1,"flows":[{"kind":"udp_cbr"}]}]})").find("rate_mbps"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"stations":[{"phy_rate_mbps":1,"flows":[{"kind":"tcp_like"}]}]})").find("window"),
            std::string::npos);
  EXPECT_EQ(category_of(R"({"stations":[{"phy_rate_mbps":1,"flows":[{"kind":"ping","direction":"up"}]}]})"),
            ErrorCategory::validation);
  EXPECT_EQ(category_of(R"({"stations":[{"phy_rate_mbps":1,"flows":[{"kind":"bulk"}]}]})"),
            ErrorCategory::validation);
  EXPECT_EQ(category_of(R"({"stations":[{"phy_rate_mbps":0}]})"), ErrorCategory::validation);
  EXPECT_EQ(category_of(R"({"config":{"codel_target_ms":200},"stations":[{"phy_rate_mbps":1}]})"),
            ErrorCategory::validation);
}

TEST(Scenario, NotJson) { EXPECT_EQ(category_of("{stations"), ErrorCategory::validation); }

TEST(Scenario, MissingFileIsIoError)
{
  try
  {
    load_scenario_file("/nonexistent/scenario.json");
    FAIL();
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.category(), ErrorCategory::io);
  }
}

TEST(Scenario, RoundTripIsFixedPoint)
{
  auto s = testutil::sparse_station(false, 12.5, 99);
  s.stations[0].flows[0].stop = 7.25;
  s.stations[1].flows.push_back(testutil::tcp(77));
  s.stations[1].flows.back().direction = FlowDirection::up;
  s.stations[1].flows.back().tid = 6;
  s.config.airtime_quantum_us = 1234.5678901234567;
  const std::string text = dump_scenario(s);
  const auto back = load_scenario_text(text);
  EXPECT_EQ(back, s);
  EXPECT_EQ(dump_scenario(back), text);
}
