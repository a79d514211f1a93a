use super::{check_inputs, Inputs, SimError};
use crate::frontend::{CiSpec, NodeId};
use crate::lpm::{
    add_sub_eval, concat_extend_eval, divide_eval, mod_correct, mult_eval, BitVec, ConcatGenerics,
    LpmError, LpmGenerics,
};
use crate::mapper::{MappedDesign, Source, Tap};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::{self, Write};

/// Clock-enable and reset stimulus around one instruction.
#[derive(Debug, Clone, Default)]
pub struct Stimulus {
    /// `(e, n)`: clk_en held low for `n` cycles just before the `e`-th enabled cycle of the run.
    pub gaps: Vec<(usize, usize)>,
    /// Raw cycle indices at which reset is asserted.
    pub resets: Vec<usize>,
    /// Enabled cycles of the run at which the driver asserts start again.
    pub extra_starts: Vec<usize>,
    /// Report re-asserted start as a fault instead of ignoring it.
    pub strict: bool,
    /// Skip per-cycle records; the summary is still produced.
    pub summary_only: bool,
}

/// State after one clock edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleRecord {
    pub cycle: usize,
    /// Enabled cycles since the last start, or `None` while idle.
    pub enabled_cycle: Option<usize>,
    pub clk_en: bool,
    pub reset: bool,
    pub start: bool,
    pub dataa: u32,
    pub datab: u32,
    pub busy: bool,
    pub step: usize,
    pub registers: BTreeMap<String, u64>,
    pub done: bool,
    pub result: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimTrace {
    pub records: Vec<CycleRecord>,
    /// Enabled cycle (0 = start) at which done was high.
    pub done_cycle: usize,
    /// Raw cycle index of the same edge, which shifts with disabled cycles.
    pub done_raw_cycle: usize,
    pub final_result: BitVec,
}

impl SimTrace {
    /// One JSON object per cycle record.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

struct Machine<'a> {
    mapped: &'a MappedDesign,
    regs: Vec<BitVec>,
    busy: bool,
    step: usize,
    done: bool,
    result: BitVec,
    load_cycles: usize,
    last_step: usize,
}

impl<'a> Machine<'a> {
    fn new(mapped: &'a MappedDesign) -> Machine<'a> {
        let mut m = Machine {
            mapped,
            regs: Vec::new(),
            busy: false,
            step: 0,
            done: false,
            result: BitVec::zero(32),
            load_cycles: mapped.load_cycles(),
            last_step: mapped.done_cycle(),
        };
        m.reset();
        m
    }

    fn reset(&mut self) {
        self.regs = self
            .mapped
            .dfg
            .nodes
            .iter()
            .map(|n| BitVec::zero(self.mapped.register_of(n.id).width))
            .collect();
        self.busy = false;
        self.step = 0;
        self.done = false;
        self.result = BitVec::zero(32);
    }

    fn load(&mut self, cycle: usize, dataa: BitVec, datab: BitVec) {
        let (a, b) = &self.mapped.loading.cycles[cycle];
        for (name, port) in std::iter::once((a, dataa)).chain(b.as_ref().map(|b| (b, datab))) {
            let reg = self
                .mapped
                .input_registers
                .iter()
                .find(|r| r.name.strip_prefix("r_") == Some(name.as_str()))
                .expect("loaded operands have registers");
            self.regs[reg.node.0] = port.truncate(reg.width);
        }
    }

    fn operand(&self, src: Source, site: &str) -> Result<BitVec, SimError> {
        match src {
            Source::Node(id) => Ok(self.regs[id.0]),
            Source::Adapter(i) => {
                let a = &self.mapped.adapters[i];
                let g = ConcatGenerics {
                    from_width: a.from_width,
                    to_width: a.to_width,
                    extension: a.extension,
                };
                concat_extend_eval(self.regs[a.source.0], &g).map_err(|source| SimError::Component {
                    site: format!("{} feeding {site}", a.label),
                    source,
                })
            }
        }
    }

    fn compute_level(&mut self, level: u32, enabled_cycle: usize) -> Result<(), SimError> {
        let mut updates: Vec<(NodeId, BitVec)> = Vec::new();
        for inst in self.mapped.instances.iter().filter(|i| i.level == level) {
            let site = inst.label.as_str();
            let a = self.operand(inst.inputs[0], site)?;
            let b = self.operand(inst.inputs[1], site)?;
            let fault = |source: LpmError| match source {
                LpmError::DivideByZero => SimError::DivideByZero {
                    site: site.to_string(),
                    cycle: Some(enabled_cycle),
                },
                source => SimError::Component {
                    site: site.to_string(),
                    source,
                },
            };
            let tapped = match (&inst.generics, inst.tap) {
                (LpmGenerics::AddSub(g), _) => add_sub_eval(a, b, g.direction),
                (LpmGenerics::Mult(g), _) => mult_eval(a, b, g),
                (LpmGenerics::Divide(g), tap) => divide_eval(a, b, g).and_then(|(q, r)| match tap {
                    Tap::Quotient => Ok(q),
                    Tap::Modulus => mod_correct(r, b, g.d_representation),
                    _ => Ok(r),
                }),
                (LpmGenerics::ConcatExtend(_), _) => Err(LpmError::InvalidGenerics(
                    "CONCAT_EXTEND cannot implement an operation".into(),
                )),
            }
            .map_err(fault)?;
            if tapped.width() < inst.width {
                return Err(fault(LpmError::WidthMismatch {
                    expected: inst.width,
                    found: tapped.width(),
                }));
            }
            updates.push((inst.node, tapped.truncate(inst.width)));
        }
        for (id, v) in updates {
            self.regs[id.0] = v;
        }
        Ok(())
    }

    fn port_result(&self) -> BitVec {
        let o = &self.mapped.output;
        self.regs[o.root.0]
            .resize(o.output_width, o.root_signed)
            .resize(32, o.output_signed)
    }

    /// One enabled, non-reset clock edge.
    fn edge(&mut self, start: bool, dataa: BitVec, datab: BitVec, phase: usize, strict: bool) -> Result<(), SimError> {
        self.done = false;
        if !self.busy {
            if start {
                self.load(0, dataa, datab);
                self.busy = true;
                self.step = 1;
            }
            return Ok(());
        }
        if start && strict {
            return Err(SimError::ProtocolViolation { cycle: phase });
        }
        let s = self.step;
        if s < self.load_cycles {
            self.load(s, dataa, datab);
        } else if self.mapped.max_level() >= 1 {
            self.compute_level((s - self.load_cycles + 1) as u32, phase)?;
        }
        if s == self.last_step {
            self.result = self.port_result();
            self.done = true;
            self.busy = false;
            self.step = 0;
        } else {
            self.step += 1;
        }
        Ok(())
    }

    fn registers(&self) -> BTreeMap<String, u64> {
        self.mapped
            .input_registers
            .iter()
            .chain(&self.mapped.interior_registers)
            .map(|r| (r.name.clone(), self.regs[r.node.0].bits()))
            .collect()
    }
}

/// Runs one instruction through the multicycle protocol. The driver asserts
/// start on the first enabled cycle (and again after any reset), delivers the
/// operand pairs of the loading plan on consecutive enabled cycles, and stops
/// at the edge where done is high.
pub fn simulate_ci(
    spec: &CiSpec,
    mapped: &MappedDesign,
    inputs: &Inputs,
    stimulus: &Stimulus,
) -> Result<SimTrace, SimError> {
    check_inputs(spec, inputs)?;
    let word = |name: &str| BitVec::from_i128(32, inputs[name] as i128);
    let pairs: Vec<(BitVec, BitVec)> = mapped
        .loading
        .cycles
        .iter()
        .map(|(a, b)| (word(a), b.as_deref().map(word).unwrap_or(BitVec::zero(32))))
        .collect();

    let mut m = Machine::new(mapped);
    let mut records = Vec::new();
    let mut pending_gap = 0usize;
    let mut enabled = 0usize;
    let mut gap_taken = vec![false; stimulus.gaps.len()];
    let mut phase: Option<usize> = None;
    let limit = 64
        + 4 * (mapped.done_cycle() + 1) * (stimulus.resets.len() + 1)
        + stimulus.gaps.iter().map(|g| g.1).sum::<usize>()
        + stimulus.resets.iter().max().copied().unwrap_or(0);

    for cycle in 0..limit {
        let reset = stimulus.resets.contains(&cycle);
        if !reset && pending_gap == 0 {
            for (i, &(at, n)) in stimulus.gaps.iter().enumerate() {
                if at == enabled && !gap_taken[i] {
                    gap_taken[i] = true;
                    pending_gap += n;
                }
            }
        }
        let clk_en = pending_gap == 0;
        let (mut start, mut dataa, mut datab) = (false, BitVec::zero(32), BitVec::zero(32));

        if reset {
            m.reset();
            phase = None;
        } else if !clk_en {
            pending_gap -= 1;
        } else {
            let p = phase.map_or(0, |p| p + 1);
            phase = Some(p);
            start = p == 0 || stimulus.extra_starts.contains(&enabled);
            if let Some(&(a, b)) = pairs.get(p) {
                dataa = a;
                datab = b;
            }
            m.edge(start, dataa, datab, p, stimulus.strict)?;
            enabled += 1;
        }

        if !stimulus.summary_only {
            records.push(CycleRecord {
                cycle,
                enabled_cycle: phase,
                clk_en,
                reset,
                start,
                dataa: dataa.bits() as u32,
                datab: datab.bits() as u32,
                busy: m.busy,
                step: m.step,
                registers: m.registers(),
                done: m.done,
                result: m.result.bits() as u32,
            });
        }
        if m.done {
            return Ok(SimTrace {
                records,
                done_cycle: phase.expect("done follows a start"),
                done_raw_cycle: cycle,
                final_result: m.result,
            });
        }
    }
    Err(SimError::Timeout(limit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{build_dfg, parse_ci_spec};
    use crate::mapper::map_dfg;

    const MAC: &str = "ci f(opcode=0) { input a : signed<32>; input b : signed<32>; input c : signed<32>; output x : signed<32>; x = a * b + c; }";

    fn setup(src: &str) -> (CiSpec, MappedDesign) {
        let spec = parse_ci_spec(src).unwrap();
        let mapped = map_dfg(&build_dfg(&spec));
        (spec, mapped)
    }

    fn abc() -> Inputs {
        [("a", 2), ("b", 3), ("c", 4)].iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn mac_default_stimulus() {
        let (spec, mapped) = setup(MAC);
        let t = simulate_ci(&spec, &mapped, &abc(), &Stimulus::default()).unwrap();
        assert_eq!(t.done_cycle, 3);
        assert_eq!(t.done_raw_cycle, 3);
        assert_eq!(t.final_result.bits(), 10);
        assert_eq!(t.records.iter().filter(|r| r.done).count(), 1);
        assert_eq!(t.records[0].registers["r_a"], 2);
        assert_eq!(t.records[1].registers["r_c"], 4);
        assert_eq!(t.records[2].registers["s_1"], 6);
    }

    #[test]
    fn identity() {
        let (spec, mapped) = setup("ci i(opcode=1) { input a : signed<8>; output y : signed<32>; y = a; }");
        let inputs = [("a".to_string(), -3)].into_iter().collect();
        let t = simulate_ci(&spec, &mapped, &inputs, &Stimulus::default()).unwrap();
        assert_eq!(t.done_cycle, 1);
        assert_eq!(t.final_result.to_signed(), -3);
    }

    #[test]
    fn gap_mid_load_shifts_only_raw_cycle() {
        let (spec, mapped) = setup(MAC);
        let stim = Stimulus {
            gaps: vec![(1, 5)],
            ..Stimulus::default()
        };
        let t = simulate_ci(&spec, &mapped, &abc(), &stim).unwrap();
        assert_eq!(t.final_result.bits(), 10);
        assert_eq!(t.done_cycle, 3);
        assert_eq!(t.done_raw_cycle, 8);
        // Registers hold still while clk_en is low.
        for w in t.records.windows(2) {
            if !w[1].clk_en {
                assert_eq!(w[0].registers, w[1].registers);
            }
        }
    }

    #[test]
    fn reset_mid_flight_then_full_run() {
        let (spec, mapped) = setup(MAC);
        let stim = Stimulus {
            resets: vec![2],
            ..Stimulus::default()
        };
        let t = simulate_ci(&spec, &mapped, &abc(), &stim).unwrap();
        let r = &t.records[2];
        assert!(r.reset && !r.done && !r.busy);
        assert!(r.registers.values().all(|&v| v == 0));
        assert_eq!(t.final_result.bits(), 10);
        assert_eq!(t.done_cycle, 3);
        assert_eq!(t.done_raw_cycle, 6);
    }

    #[test]
    fn strict_mode_rejects_restart() {
        let (spec, mapped) = setup(MAC);
        let mut stim = Stimulus {
            extra_starts: vec![2],
            ..Stimulus::default()
        };
        let t = simulate_ci(&spec, &mapped, &abc(), &stim).unwrap();
        assert_eq!(t.final_result.bits(), 10);
        stim.strict = true;
        assert_eq!(
            simulate_ci(&spec, &mapped, &abc(), &stim),
            Err(SimError::ProtocolViolation { cycle: 2 })
        );
    }

    #[test]
    fn divide_by_zero_names_cycle() {
        let (spec, mapped) = setup("ci d(opcode=0) { input a : signed<8>; input b : signed<8>; output x : signed<8>; x = a / b; }");
        let inputs = [("a".to_string(), 5), ("b".to_string(), 0)].into_iter().collect();
        let e = simulate_ci(&spec, &mapped, &inputs, &Stimulus::default()).unwrap_err();
        assert_eq!(
            e,
            SimError::DivideByZero {
                site: "u_divs_1".into(),
                cycle: Some(1)
            }
        );
    }

    #[test]
    fn jsonl_has_one_line_per_cycle() {
        let (spec, mapped) = setup(MAC);
        let t = simulate_ci(&spec, &mapped, &abc(), &Stimulus::default()).unwrap();
        let mut buf = Vec::new();
        t.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
        assert_eq!(last["done"], true);
        assert_eq!(last["result"], 10);
    }
}
