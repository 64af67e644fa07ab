//! Human-readable record of one protocol run. The transmitted section holds
//! exactly what servers see; the private section is client state.

use std::fmt::Write;

use oneshot_pir::protocol::{DecodingState, QueryBatch, ResponseBatch};

pub fn render(batch: &QueryBatch, responses: &ResponseBatch, state: &DecodingState) -> String {
    let mut out = String::new();
    out.push_str("[transmitted]\n");
    for i in 0..batch.servers() {
        let _ = writeln!(out, "server {}", i + 1);
        for (j, q) in batch.server(i).iter().enumerate() {
            let _ = writeln!(out, "  q{j}: {q} -> {}", responses.server(i)[j]);
        }
    }
    out.push_str("[private]\n");
    let _ = writeln!(out, "desired message {}", state.desired + 1);
    for slot in &state.slots {
        let a = slot.vector.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let cancel = slot
            .cancel
            .iter()
            .map(|(s, i, c)| format!("{c}*s{}q{i}", s + 1))
            .collect::<Vec<_>>()
            .join(" + ");
        let _ = writeln!(out, "  s{}q{}: a = ({a}); noise = {}", slot.server + 1, slot.index, if cancel.is_empty() { "0".into() } else { cancel });
    }
    out
}
