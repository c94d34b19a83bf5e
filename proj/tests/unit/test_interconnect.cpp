#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "expect_error.hpp"
#include "mim/interconnect.hpp"

using namespace mim;
using testing_support::walking_assembly;

namespace {

AssemblyGraph bare() {
  return AssemblyGraph({make_mim("mim"), make_walking_manipulator("wm1"), make_walking_manipulator("wm2")});
}

AssemblyGraph full(AssemblyGraph g, const std::string& port) {
  while (g.port(port).state != CouplingState::FullCoupled) g = advance_coupling(g, port);
  return g;
}

// Structural invariants checked from the raw port table.
void expect_consistent(const AssemblyGraph& g) {
  std::map<std::string, const SiPort*> ports;
  for (const auto& m : g.modules())
    for (const auto& p : m.ports) ports[p.id] = &p;
  std::set<std::string> fixtures;
  for (const auto& [id, p] : ports) {
    EXPECT_FALSE(p->peer && p->fixture) << id;
    if (p->state != CouplingState::Free) EXPECT_TRUE(p->peer || p->fixture) << id;
    if (p->state == CouplingState::Free) EXPECT_TRUE(!p->peer && !p->fixture) << id;
    if (p->peer) {
      const SiPort* q = ports.at(*p->peer);
      EXPECT_EQ(q->peer, id);
      EXPECT_EQ(q->state, p->state);
      EXPECT_NE(q->owner, p->owner);
    }
    if (p->fixture) EXPECT_TRUE(fixtures.insert(*p->fixture).second) << "fixture held twice: " << *p->fixture;
  }
}

// Independent check: does the MIM's coupled component touch a fixture or a grounded module?
bool held_oracle(const AssemblyGraph& g, const std::string& module) {
  std::set<std::string> seen{module};
  std::vector<std::string> stack{module};
  while (!stack.empty()) {
    const std::string m = stack.back();
    stack.pop_back();
    const ModuleAsset& asset = g.module(m);
    if (asset.kind == ModuleKind::Shuttle || asset.kind == ModuleKind::LargeArm) return true;
    for (const auto& p : asset.ports) {
      if (p.fixture) return true;
      if (p.peer) {
        const std::string other = g.port(*p.peer).owner;
        if (seen.insert(other).second) stack.push_back(other);
      }
    }
  }
  return false;
}

}  // namespace

TEST(Couple, TwoFreePortsLatch) {
  const auto g = couple(bare(), "mim:left", "wm1:a");
  EXPECT_EQ(g.port("mim:left").state, CouplingState::Latched);
  EXPECT_EQ(g.port("wm1:a").state, CouplingState::Latched);
  EXPECT_EQ(g.port("mim:left").peer, "wm1:a");
}

TEST(Couple, FullCoupledPortIsBusy) {
  const auto g = full(couple(bare(), "mim:left", "wm1:a"), "mim:left");
  EXPECT_MIM_ERROR(couple(g, "mim:left", "wm2:a"), ErrorCode::PortBusy);
}

TEST(Couple, RearPortWithWalkingManipulator) {
  const auto g = couple(bare(), "mim:rear", "wm2:a");
  const auto cs = g.couplings();
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].port_a, "mim:rear");
  EXPECT_EQ(cs[0].port_b, "wm2:a");
}

TEST(Couple, SameModuleRejected) { EXPECT_MIM_ERROR(couple(bare(), "mim:left", "mim:rear"), ErrorCode::SelfCoupling); }

TEST(Couple, UnknownPort) { EXPECT_MIM_ERROR(couple(bare(), "mim:top", "wm1:a"), ErrorCode::UnknownPort); }

TEST(Advance, LatchedToPowerMirrored) {
  const auto g = advance_coupling(couple(bare(), "mim:left", "wm1:a"), "wm1:a");
  EXPECT_EQ(g.port("mim:left").state, CouplingState::PowerCoupled);
  EXPECT_EQ(g.port("wm1:a").state, CouplingState::PowerCoupled);
}

TEST(Advance, FullIsTerminal) {
  const auto g = full(couple(bare(), "mim:left", "wm1:a"), "mim:left");
  EXPECT_MIM_ERROR(advance_coupling(g, "mim:left"), ErrorCode::AlreadyFull);
}

TEST(Advance, FreePortNotCoupled) { EXPECT_MIM_ERROR(advance_coupling(bare(), "mim:left"), ErrorCode::NotCoupled); }

TEST(Anchor, OccupiedFixtureRejected) {
  const auto g = anchor(bare(), "wm1:b", "F0");
  EXPECT_MIM_ERROR(anchor(g, "wm2:b", "F0"), ErrorCode::FixtureOccupied);
}

TEST(Decouple, SoleAnchorWouldDetach) {
  const auto g = walking_assembly("F0", "");
  ASSERT_TRUE(held_oracle(g, "mim"));
  EXPECT_MIM_ERROR(decouple(g, "wm1:b"), ErrorCode::WouldDetachAssembly);
  EXPECT_MIM_ERROR(decouple(g, "mim:left"), ErrorCode::WouldDetachAssembly);
}

TEST(Decouple, OneOfTwoAnchors) {
  const auto g = decouple(walking_assembly("F0", "F1"), "wm2:b");
  EXPECT_EQ(g.anchors().size(), 1u);
  EXPECT_EQ(g.anchors()[0].fixture, "F0");
}

TEST(Decouple, FreePortNotCoupled) { EXPECT_MIM_ERROR(decouple(bare(), "mim:left"), ErrorCode::NotCoupled); }

TEST(Decouple, FreeFloatingAssemblyMayDecouple) {
  const auto g = couple(bare(), "mim:left", "wm1:a");
  EXPECT_EQ(decouple(g, "mim:left"), bare());
}

TEST(Decouple, RoundTripRestoresAssembly) {
  const auto start = walking_assembly("F0", "F1");
  const auto g = decouple(start, "wm1:b");
  const auto restored = full(anchor(g, "wm1:b", "F0"), "wm1:b");
  EXPECT_EQ(restored, start);
  const auto tool = couple(bare(), "mim:right", "wm1:a");
  EXPECT_EQ(decouple(tool, "wm1:a"), bare());
}

TEST(Decouple, RandomOperationsKeepInvariants) {
  std::mt19937_64 gen(2024);
  const std::vector<std::string> ports = {"mim:left", "mim:rear", "mim:right", "wm1:a", "wm1:b", "wm2:a", "wm2:b"};
  const std::vector<std::string> fixtures = {"F0", "F1", "F2"};
  for (int run = 0; run < 200; ++run) {
    AssemblyGraph g = bare();
    for (int step = 0; step < 40; ++step) {
      const auto& a = ports[gen() % ports.size()];
      const auto& b = ports[gen() % ports.size()];
      const bool held_before = held_oracle(g, "mim");
      try {
        switch (gen() % 4) {
          case 0: g = couple(g, a, b); break;
          case 1: g = anchor(g, a, fixtures[gen() % fixtures.size()]); break;
          case 2: g = advance_coupling(g, a); break;
          default: {
            const auto next = decouple(g, a);
            if (held_before) EXPECT_TRUE(held_oracle(next, "mim"));
            g = next;
          }
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::WouldDetachAssembly) EXPECT_TRUE(held_before);
      }
      expect_consistent(g);
      EXPECT_EQ(g.is_held("mim"), held_oracle(g, "mim"));
    }
  }
}

TEST(Configuration, WalkingWithTwoAnchoredLegs) {
  EXPECT_EQ(validate_configuration(walking_assembly("F0", "F1")), Configuration::Walking);
}

TEST(Configuration, WalkingWithOneAnchoredLeg) {
  EXPECT_EQ(validate_configuration(walking_assembly("F0", "")), Configuration::Walking);
}

TEST(Configuration, ThirdArmOnToolPortIsMaintenance) {
  EXPECT_EQ(validate_configuration(testing_support::maintenance_assembly()), Configuration::Maintenance);
}

TEST(Configuration, AllPortsFreeIsUnanchored) {
  EXPECT_MIM_ERROR(validate_configuration(AssemblyGraph({make_mim("mim")})), ErrorCode::UnanchoredAssembly);
}

TEST(Configuration, SingleLegToFixtureIsExternallyMounted) {
  AssemblyGraph g({make_mim("mim"), make_walking_manipulator("wm1")});
  g = full(couple(g, "mim:left", "wm1:a"), "mim:left");
  g = full(anchor(g, "wm1:b", "F0"), "wm1:b");
  EXPECT_EQ(validate_configuration(g), Configuration::ExternallyMounted);
}

TEST(Configuration, LargeArm) {
  AssemblyGraph g({make_mim("mim"), make_single_port_module("arm", ModuleKind::LargeArm)});
  g = full(couple(g, "mim:rear", "arm:si"), "mim:rear");
  EXPECT_EQ(validate_configuration(g), Configuration::LargeArmMounted);
}

TEST(Configuration, ShuttleHoldsTheChain) {
  AssemblyGraph g({make_mim("mim"), make_walking_manipulator("wm1"), make_single_port_module("sh", ModuleKind::Shuttle)});
  g = full(couple(g, "mim:left", "wm1:a"), "mim:left");
  g = full(couple(g, "wm1:b", "sh:si"), "wm1:b");
  EXPECT_EQ(validate_configuration(g), Configuration::ExternallyMounted);
}

TEST(Configuration, TwoMimsUnrecognized) {
  AssemblyGraph g({make_mim("m1"), make_mim("m2")});
  EXPECT_MIM_ERROR(validate_configuration(g), ErrorCode::Unrecognized);
}

TEST(Configuration, PureFunctionOfStructure) {
  const auto a = walking_assembly("F0", "F1");
  const auto b = walking_assembly("F0", "F1");
  EXPECT_EQ(validate_configuration(a), validate_configuration(b));
}

TEST(Power, EmptyAssembly) {
  const PowerReport p = power_check(AssemblyGraph{});
  EXPECT_EQ(p.total_power_w, 0.0);
  EXPECT_EQ(p.total_current_a, 0.0);
  EXPECT_TRUE(p.within_limit);
}

TEST(Power, DefaultMimDraws70W) {
  const PowerReport p = power_check(AssemblyGraph({make_mim("mim")}));
  EXPECT_NEAR(p.total_power_w, 5 * 5.0 + 25.0 + 20.0, 1e-12);
  EXPECT_NEAR(p.total_current_a, 70.0 / 48.0, 1e-12);
  EXPECT_TRUE(p.within_limit);
}

TEST(Power, SevenHundredWattsExceedsLimit) {
  const PowerReport p = power_check(AssemblyGraph({make_single_port_module("load", ModuleKind::Tool, 700.0)}));
  EXPECT_NEAR(p.total_current_a, 700.0 / 48.0, 1e-9);
  EXPECT_FALSE(p.within_limit);
}

TEST(Power, LimitIsInclusive) {
  const PowerReport p = power_check(AssemblyGraph({make_single_port_module("load", ModuleKind::Tool, 14.0 * 48.0)}));
  EXPECT_TRUE(p.within_limit);
}

TEST(Power, TotalMatchesBruteForceSum) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> w(0.0, 80.0);
  for (int run = 0; run < 50; ++run) {
    std::vector<ModuleAsset> modules;
    double expected = 0.0;
    for (int i = 0; i < 6; ++i) {
      ModuleAsset m = make_single_port_module("m" + std::to_string(i), ModuleKind::Tool, w(gen));
      m.internal_units = {{"u1", w(gen)}, {"u2", w(gen)}};
      expected += m.power_draw_w;
      for (const auto& u : m.internal_units) expected += u.watts;
      modules.push_back(std::move(m));
    }
    EXPECT_NEAR(power_check(AssemblyGraph(std::move(modules))).total_power_w, expected, 1e-9);
  }
}

TEST(Route, SelfDelivery) {
  const RouteResult r = route_message(bare(), "mim", "mim", "status");
  EXPECT_TRUE(r.delivered);
  EXPECT_EQ(r.hops, 0);
}

TEST(Route, FullCoupledNeighbor) {
  const RouteResult r = route_message(walking_assembly("F0", "F1"), "mim", "wm1", "status");
  EXPECT_TRUE(r.delivered);
  EXPECT_EQ(r.hops, 1);
}

TEST(Route, LatchedLinkCarriesNoData) {
  const RouteResult r = route_message(couple(bare(), "mim:left", "wm1:a"), "mim", "wm1", "status");
  EXPECT_FALSE(r.delivered);
}

TEST(Route, UnknownModule) { EXPECT_MIM_ERROR(route_message(bare(), "mim", "ghost", "t"), ErrorCode::UnknownModule); }

TEST(Route, SymmetricOnRandomChains) {
  std::mt19937_64 gen(77);
  for (int run = 0; run < 100; ++run) {
    std::vector<ModuleAsset> modules;
    for (int i = 0; i < 6; ++i) modules.push_back(make_walking_manipulator("w" + std::to_string(i)));
    AssemblyGraph g(std::move(modules));
    for (int i = 0; i < 8; ++i) {
      const std::string a = "w" + std::to_string(gen() % 6) + (gen() % 2 ? ":a" : ":b");
      const std::string b = "w" + std::to_string(gen() % 6) + (gen() % 2 ? ":a" : ":b");
      try {
        g = couple(g, a, b);
        for (unsigned k = gen() % 3; k > 0; --k) g = advance_coupling(g, a);
      } catch (const Error&) {
      }
    }
    for (int x = 0; x < 6; ++x)
      for (int y = 0; y < 6; ++y) {
        const auto f = route_message(g, "w" + std::to_string(x), "w" + std::to_string(y), "t");
        const auto r = route_message(g, "w" + std::to_string(y), "w" + std::to_string(x), "t");
        EXPECT_EQ(f.delivered, r.delivered);
        EXPECT_EQ(f.hops, r.hops);
      }
  }
}

TEST(Assembly, MimNeedsThreePorts) {
  ModuleAsset m = make_mim("mim");
  m.ports.pop_back();
  EXPECT_MIM_ERROR(AssemblyGraph({m}), ErrorCode::InvalidArgument);
}

TEST(Assembly, CouplingStateStrings) {
  for (auto s : {CouplingState::Free, CouplingState::Latched, CouplingState::PowerCoupled, CouplingState::FullCoupled})
    EXPECT_EQ(parse_coupling_state(to_string(s)), s);
  EXPECT_EQ(to_string(CouplingState::PowerCoupled), "power");
}
