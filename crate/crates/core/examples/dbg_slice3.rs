use std::collections::HashMap;
use thompson_core::growth::*;
use thompson_core::word::Letter;

fn main() {
    let maxn = 9usize;
    let gens = [Letter{index:0,sign:1},Letter{index:0,sign:-1},Letter{index:1,sign:1},Letter{index:1,sign:-1}];
    let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
    let id = ForestDiagram::identity();
    seen.insert(id.key(), ());
    let mut frontier = vec![id];
    let mut all: Vec<ForestDiagram> = frontier.clone();
    for _ in 1..=maxn {
        let mut next = Vec::new();
        for f in &frontier {
            for g in gens {
                let d = f.act_letter(g).unwrap();
                let k = d.key();
                if !seen.contains_key(&k) { seen.insert(k, ()); next.push(d); }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    let mut table: HashMap<SliceCoords, usize> = HashMap::new();
    for d in &all {
        if let Some(c) = classify(d) { *table.entry(c).or_default() += 1; }
    }
    let z = |i: u32, j: u32, p: i64, q: i64, n: i64| -> i64 {
        if n < 0 { return 0; }
        *table.get(&SliceCoords{i,j,p,q,n: n as u64}).unwrap_or(&0) as i64
    };
    // R3 for i==1, j>=1: lhs = z(1,j,p,q,n), claimed rhs = z(0,j,p+1,q,n-1)
    // report all differences; lhs fully known only if n <= maxn and rhs n-1 <= maxn
    println!("--- R3 boundary i=1, j>=1: lhs - rhs (nonzero only) ---");
    for j in 1..=6u32 { for p in 0i64..=8 { for q in 0i64..=8 { for n in 1..=maxn as i64 {
        let l = z(1,j,p,q,n); let r = z(0,j,p+1,q,n-1);
        if l != r { println!("j={j} p={p} q={q} n={n}: lhs={l} rhs={r} diff={}", l-r); }
    }}}}
    println!("--- R5: i=1,j=0,q=0: lhs vs 1 + sum_(c,d)!=0 sum_(r=-(n-1))..-1 z(c,d,r+p+1,r,n-1) ---");
    for p in 0i64..=6 { for n in 1..=maxn as i64 {
        let l = z(1,0,p,0,n);
        let mut s = 0i64;
        for c in 0..=9u32 { for d in 0..=9u32 { if (c,d)==(0,0) { continue }
            for r in -(n-1)..=-1 { s += z(c,d,r+p+1,r,n-1); }
        }}
        // how many x0-powers in the image? check both 0 and 1 corrections
        println!("p={p} n={n}: lhs={l} sum={s} lhs-sum={}", l-s);
    }}
    println!("--- R6: i=1,j=0,q>0 ---");
    for q in 1i64..=3 { for p in q..=6 { for n in 1..=maxn as i64 {
        let l = z(1,0,p,q,n);
        if l == 0 { continue }
        // paper's form: sum over r=0..q-1 of z(c,d,r+p+1-q,r, n-2((q-1)-r)-1) + sum r=-n..-1 z(c,d,r+p+1-q,r,n-2(q-1)-1) + 1
        let mut s1 = 0i64;
        for c in 0..=9u32 { for d in 0..=9u32 { if (c,d)==(0,0) { continue }
            for r in 0..q { let m = n - 2*((q-1)-r) - 1; s1 += z(c,d,r+p+1-q,r,m); }
            let m2 = n - 2*(q-1) - 1;
            for r in -(if m2 > 0 { m2 } else { 0 })..=-1 { s1 += z(c,d,r+p+1-q,r,m2); }
        }}
        println!("q={q} p={p} n={n}: lhs={l} paperform={} diff={}", s1, l-s1);
    }}}
}
