//! Sup-norm risk over a ladder of sample sizes and the fitted rate exponent,
//! adaptive selection against the smallest grid level.
//!
//! cargo run --release --example rate_campaign

use supnorm_adapt::lepski::{SelectorKind, SelectorVariant};
use supnorm_adapt::risk_lab::experiments::rate_campaign;
use supnorm_adapt::risk_lab::{LevelRule, TestDensity};
use supnorm_adapt::{ProjectionKernel, StreamKey};

fn main() -> supnorm_adapt::Result<()> {
    let density = TestDensity::Triangular;
    let kernel = ProjectionKernel::haar();
    let ladder = [1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14];
    let key = StreamKey::root(2024);
    let adaptive = LevelRule::Select {
        variant: SelectorVariant::new(SelectorKind::BarEps),
    };
    for (name, rule) in [("adaptive", adaptive), ("grid-min", LevelRule::GridMin)] {
        let c = rate_campaign(&density, &kernel, rule, &ladder, 30, &key)?;
        println!(
            "{name}: slope {:.3} ± {:.3}",
            c.regression.slope, c.regression.half_width
        );
        for r in &c.risks {
            println!(
                "  n = {:>6}  risk {:.4} ± {:.4}  median level {}",
                r.n,
                r.mean,
                r.std_err,
                r.median_level()
            );
        }
    }
    Ok(())
}
