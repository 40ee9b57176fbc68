//! Built-in run configurations and sweep specifications.

pub struct Preset {
    pub name: &'static str,
    pub kind: PresetKind,
    pub summary: &'static str,
    pub body: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetKind {
    Run,
    Sweep,
    Timing,
    Trace,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig3a-m4-k500",
        kind: PresetKind::Run,
        summary: "M=4, N=8, K=500 at 930 Mb/s",
        body: "antennas = 4\nstations = 8\nbuffer_size = 500\nmax_ampdu = 64\noffered_load = 930e6\n",
    },
    Preset {
        name: "fig3a-m4-k1000",
        kind: PresetKind::Run,
        summary: "M=4, N=8, K=1000 at 1098 Mb/s",
        body: "antennas = 4\nstations = 8\nbuffer_size = 1000\nmax_ampdu = 64\noffered_load = 1098e6\n",
    },
    Preset {
        name: "fig3a-m8-k1000",
        kind: PresetKind::Run,
        summary: "M=8, N=16, K=1000 at 1390 Mb/s",
        body: "antennas = 8\nstations = 16\nbuffer_size = 1000\nmax_ampdu = 64\noffered_load = 1390e6\n",
    },
    Preset {
        name: "fig3a-m8-k2000",
        kind: PresetKind::Run,
        summary: "M=8, N=16, K=2000 at 1740 Mb/s",
        body: "antennas = 8\nstations = 16\nbuffer_size = 2000\nmax_ampdu = 64\noffered_load = 1740e6\n",
    },
    Preset {
        name: "fig3a-m4",
        kind: PresetKind::Sweep,
        summary: "blocking vs load, M=4, N=8, K in {500, 1000, 2000}, reference and ideal",
        body: r#"
axis = "offered_load"
range = { start = 800e6, stop = 1200e6, step = 20e6 }
replications = 3

[base]
antennas = 4
stations = 8
max_ampdu = 64

[[variants]]
name = "k500-reference"
buffer_size = 500
[[variants]]
name = "k1000-reference"
buffer_size = 1000
[[variants]]
name = "k2000-reference"
buffer_size = 2000
[[variants]]
name = "k500-ideal"
buffer_size = 500
scheduler = "ideal"
[[variants]]
name = "k1000-ideal"
buffer_size = 1000
scheduler = "ideal"
[[variants]]
name = "k2000-ideal"
buffer_size = 2000
scheduler = "ideal"
"#,
    },
    Preset {
        name: "fig3a-m8",
        kind: PresetKind::Sweep,
        summary: "blocking vs load, M=8, N=16, K in {500, 1000, 2000}, reference and ideal",
        body: r#"
axis = "offered_load"
range = { start = 1100e6, stop = 1900e6, step = 20e6 }
replications = 3

[base]
antennas = 8
stations = 16
max_ampdu = 64

[[variants]]
name = "k500-reference"
buffer_size = 500
[[variants]]
name = "k1000-reference"
buffer_size = 1000
[[variants]]
name = "k2000-reference"
buffer_size = 2000
[[variants]]
name = "k500-ideal"
buffer_size = 500
scheduler = "ideal"
[[variants]]
name = "k1000-ideal"
buffer_size = 1000
scheduler = "ideal"
[[variants]]
name = "k2000-ideal"
buffer_size = 2000
scheduler = "ideal"
"#,
    },
    Preset {
        name: "fig3b-3c",
        kind: PresetKind::Sweep,
        summary: "E[m], E[b], E[m*b] and delay vs N at M=4",
        body: r#"
axis = "stations"
range = { start = 4, stop = 32, step = 1 }
replications = 1

[base]
antennas = 4
max_ampdu = 64
horizon = 2000000

[[variants]]
name = "k500-930M"
buffer_size = 500
offered_load = 930e6
[[variants]]
name = "k1000-1098M"
buffer_size = 1000
offered_load = 1098e6
"#,
    },
    Preset {
        name: "smax-table",
        kind: PresetKind::Timing,
        summary: "cycle breakdown and S_max for M in {1,2,4,8}, B in {1,16,32,64}",
        body: "antennas = [1, 2, 4, 8]\nmax_ampdu = [1, 16, 32, 64]\n",
    },
    Preset {
        name: "fig2-trace",
        kind: PresetKind::Trace,
        summary: "scripted M=2, B=2, K=8 walkthrough with one blocked packet",
        body: "",
    },
];

pub fn find(name: &str, kind: PresetKind) -> anyhow::Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name && p.kind == kind)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS
                .iter()
                .filter(|p| p.kind == kind)
                .map(|p| p.name)
                .collect();
            anyhow::anyhow!(
                "unknown preset `{name}` for this command; available: {}",
                names.join(", ")
            )
        })
}
