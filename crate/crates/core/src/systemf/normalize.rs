use thiserror::Error;

use super::untyped::{erase, Untyped};
use crate::syntax::TargetTerm;

pub const DEFAULT_FUEL: usize = 100_000;

/// Terms grown past this many nodes are treated like running out of fuel.
const SIZE_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("normalisation did not finish within {fuel} reduction steps")]
pub struct FuelExhausted {
    pub fuel: usize,
}

struct Machine {
    fuel: usize,
    used: usize,
}

impl Machine {
    fn tick(&mut self, t: &Untyped) -> Result<(), FuelExhausted> {
        self.used += 1;
        if self.used > self.fuel || t.size() > SIZE_LIMIT {
            return Err(FuelExhausted { fuel: self.fuel });
        }
        Ok(())
    }

    fn whnf(&mut self, t: Untyped) -> Result<Untyped, FuelExhausted> {
        let mut t = t;
        loop {
            // Unwind the spine to find the head.
            let mut args = Vec::new();
            let mut head = t;
            while let Untyped::App(f, a) = head {
                args.push(*a);
                head = *f;
            }
            match head {
                Untyped::Lam(_, body) if !args.is_empty() => {
                    let arg = args.pop().unwrap();
                    let reduced = body.instantiate(&arg, 0);
                    self.tick(&reduced)?;
                    t = args
                        .into_iter()
                        .rev()
                        .fold(reduced, Untyped::app);
                }
                other => {
                    return Ok(args.into_iter().rev().fold(other, Untyped::app));
                }
            }
        }
    }

    fn nf(&mut self, t: Untyped) -> Result<Untyped, FuelExhausted> {
        match self.whnf(t)? {
            Untyped::Lam(h, body) => {
                let body = self.nf(*body)?;
                if let Untyped::App(f, a) = &body {
                    if **a == Untyped::Bound(0) && !f.has_bound(0) {
                        let contracted = f.shift(-1, 0);
                        self.tick(&contracted)?;
                        return Ok(contracted);
                    }
                }
                Ok(Untyped::lam(h, body))
            }
            Untyped::App(f, a) => {
                // Head is neutral after whnf.
                let f = self.nf(*f)?;
                let a = self.nf(*a)?;
                Ok(Untyped::app(f, a))
            }
            atom => Ok(atom),
        }
    }
}

/// βη-normal form by leftmost-outermost reduction.
pub fn normalize(u: &Untyped, fuel: usize) -> Result<Untyped, FuelExhausted> {
    Machine { fuel, used: 0 }.nf(u.clone())
}

/// `t1 ≈ t2`: equal βη-normal forms after erasure, free variables compared by name.
pub fn equiv(t1: &TargetTerm, t2: &TargetTerm, fuel: usize) -> Result<bool, FuelExhausted> {
    let n1 = normalize(&erase(t1), fuel)?;
    let n2 = normalize(&erase(t2), fuel)?;
    Ok(n1 == n2)
}
