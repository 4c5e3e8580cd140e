#include "seasonal/demand.hpp"
#include "seasonal/errors.hpp"
#include "seasonal/system_model.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace seasonal;

namespace
{

const char* minimal_case = R"(
[meta]
name,tiny
reference_bus,1

[buses]
1

[generators]
# id,bus,fuel,p_min,p_max,ramp_up,ramp_down,min_up,min_down,startup_cost,fixed_cost,blocks,energy_budget
G1,1,gas,10,100,100,100,1,1,50,5,100:20,-

[shares]
1,1.0
)";

bool has_rule(const std::vector<Violation>& v, const std::string& entity_part, const std::string& rule_part)
{
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) {
        return x.entity.find(entity_part) != std::string::npos && x.rule.find(rule_part) != std::string::npos;
    });
}

} // namespace

TEST(ParseCase, MinimalCase)
{
    NetworkCase c = parse_case(minimal_case);
    EXPECT_EQ(c.buses.size(), 1u);
    ASSERT_EQ(c.units.size(), 1u);
    EXPECT_TRUE(c.lines.empty());
    EXPECT_EQ(c.units[0].id, "G1");
    EXPECT_DOUBLE_EQ(c.units[0].p_min, 10);
    EXPECT_EQ(c.units[0].blocks, (std::vector<CostBlock>{{100, 20}}));
    EXPECT_FALSE(c.units[0].energy_budget);
    EXPECT_TRUE(validate_case(c).empty());
}

TEST(ParseCase, BundledCaseHas24BusesAndCoalShare)
{
    NetworkCase c = load_case(SEASONAL_DATA_DIR "/rts24.case");
    EXPECT_EQ(c.buses.size(), 24u);
    EXPECT_EQ(c.lines.size(), 38u);
    EXPECT_TRUE(validate_case(c).empty());
    double coal = 0;
    for(const auto& u : c.units)
        if(u.fuel_kind() == Fuel::coal)
            coal += u.p_max;
    EXPECT_NEAR(coal / c.total_capacity(), 0.35, 0.02);
}

TEST(ParseCase, BundledCapacityCoversPeakDemand)
{
    NetworkCase c = load_case(SEASONAL_DATA_DIR "/rts24.case");
    DemandSeries d = load_demand(SEASONAL_DATA_DIR "/demand_observed.csv", &c);
    EXPECT_GT(c.total_capacity(), d.peak_system());
}

TEST(ParseCase, EmitThenParseIsIdentity)
{
    NetworkCase c = load_case(SEASONAL_DATA_DIR "/rts24.case");
    EXPECT_EQ(parse_case(emit_case(c)), c);
    NetworkCase tiny = parse_case(minimal_case);
    EXPECT_EQ(parse_case(emit_case(tiny)), tiny);
}

TEST(ParseCase, DanglingBusReportsLine)
{
    std::string text = minimal_case;
    text.replace(text.find("G1,1,"), 5, "G1,7,");
    try
    {
        parse_case(text);
        FAIL() << "expected ParseError";
    }
    catch(const ParseError& e)
    {
        EXPECT_GT(e.line(), 0);
    }
}

TEST(ParseCase, DuplicateUnitRejected)
{
    std::string text = minimal_case;
    text += "\n[generators]\nG1,1,gas,10,100,100,100,1,1,50,5,100:20,-\n";
    EXPECT_THROW(parse_case(text), ParseError);
}

TEST(ParseCase, BadNumberNamesField)
{
    std::string text = minimal_case;
    text.replace(text.find(",10,100,"), 8, ",ten,100,");
    try
    {
        parse_case(text);
        FAIL() << "expected ParseError";
    }
    catch(const ParseError& e)
    {
        EXPECT_EQ(e.field(), "p_min");
    }
}

TEST(ValidateCase, PminAbovePmaxNamesUnit)
{
    NetworkCase c = parse_case(minimal_case);
    c.units[0].p_min = 150;
    auto v = validate_case(c);
    ASSERT_FALSE(v.empty());
    EXPECT_TRUE(has_rule(v, "G1", "p_min"));
}

TEST(ValidateCase, DisconnectedBusesFlagged)
{
    NetworkCase c = parse_case(minimal_case);
    c.buses.push_back(BusId{2});
    c.demand_share = {{BusId{1}, 0.5}, {BusId{2}, 0.5}};
    auto v = validate_case(c);
    EXPECT_TRUE(has_rule(v, "", "connect"));
}

TEST(ValidateCase, SharesMustSumToOne)
{
    NetworkCase c = parse_case(minimal_case);
    c.demand_share[BusId{1}] = 0.9;
    EXPECT_FALSE(validate_case(c).empty());
}

TEST(ValidateCase, BlocksMustBeConvexAndCoverPmax)
{
    NetworkCase c = parse_case(minimal_case);
    c.units[0].blocks = {{50, 30}, {50, 20}};
    EXPECT_FALSE(validate_case(c).empty());
    c.units[0].blocks = {{40, 20}, {50, 30}};
    EXPECT_FALSE(validate_case(c).empty());
}

TEST(ValidateCase, UnknownFuelRejected)
{
    NetworkCase c = parse_case(minimal_case);
    c.units[0].fuel = "wind";
    EXPECT_FALSE(validate_case(c).empty());
    EXPECT_THROW(c.units[0].fuel_kind(), ValidationError);
}

TEST(ValidateCase, BudgetAboveMonthlyCapacity)
{
    NetworkCase c = parse_case(minimal_case);
    c.units[0].energy_budget = 100.0 * 720 + 1;
    EXPECT_FALSE(validate_case(c).empty());
}

TEST(InitialConditions, ColdStartIsFreeToStart)
{
    NetworkCase c = load_case(SEASONAL_DATA_DIR "/rts24.case");
    auto cold = cold_start(c);
    for(std::size_t i = 0; i < c.units.size(); ++i)
    {
        EXPECT_FALSE(cold[i].on);
        EXPECT_GE(cold[i].dt0, c.units[i].min_down);
        EXPECT_EQ(cold[i].g0, 0.0);
    }
    auto init = default_initial_conditions(c);
    auto nuclear = *c.unit_position("G18");
    EXPECT_TRUE(init[nuclear].on);
    EXPECT_DOUBLE_EQ(init[nuclear].g0, 400);
}
