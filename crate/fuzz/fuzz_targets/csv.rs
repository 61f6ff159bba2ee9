#![no_main]

use libfuzzer_sys::fuzz_target;
use miesim::plot::{plot_csv, PlotKind};

fuzz_target!(|data: &[u8]| {
    for kind in [PlotKind::MieScan, PlotKind::ChiDepth] {
        if let Ok(svg) = plot_csv(data, kind) {
            assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        }
    }
});
