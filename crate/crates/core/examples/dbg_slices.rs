// certify slice reduction rules against the BFS-classified table
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
                if !seen.contains_key(&k) {
                    seen.insert(k, ());
                    next.push(d);
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    println!("ball size to {maxn}: {}", all.len());
    // classify
    let mut table: HashMap<SliceCoords, Vec<ForestDiagram>> = HashMap::new();
    let mut powers = 0usize;
    for d in &all {
        match classify(d) {
            None => powers += 1,
            Some(c) => { assert_eq!(c.n, length(d)); table.entry(c).or_default().push(d.clone()); }
        }
    }
    println!("x0-powers: {powers}");
    // exhaustiveness/disjointness: sphere(n) = 2 + sum of slices at n
    let spheres = bfs_spheres(maxn);
    for n in 1..=maxn {
        let total: usize = table.iter().filter(|(c,_)| c.n == n as u64).map(|(_,v)| v.len()).sum();
        assert_eq!(total + 2, spheres[n] as usize, "partition at n={n}");
    }
    println!("partition check OK");
    let z = |t: &HashMap<SliceCoords, Vec<ForestDiagram>>, i: u32, j: u32, p: i64, q: i64, n: i64| -> usize {
        if n < 0 { return 0; }
        t.get(&SliceCoords{i,j,p,q,n: n as u64}).map(|v| v.len()).unwrap_or(0)
    };
    // R0: inversion symmetry z(i,j,p,q,n) = z(j,i,q,p,n)
    for (c, v) in &table {
        assert_eq!(v.len(), z(&table, c.j, c.i, c.q, c.p, c.n as i64), "R0 {c:?}");
    }
    println!("R0 OK");
    // R1: p<0 && q<0 -> (p+1, q+1, n-2); only check lhs occupied or rhs occupied within ball bound n-2<=maxn
    let mut r1_checked = 0;
    for i in 0..=6u32 { for j in 0..=6u32 { if (i,j)==(0,0) {continue}
        for p in -9i64..0 { for q in -9i64..0 { for n in 2..=maxn as i64 {
            let lhs = z(&table,i,j,p,q,n); let rhs = z(&table,i,j,p+1,q+1,n-2);
            assert_eq!(lhs, rhs, "R1 at {:?}", (i,j,p,q,n)); if lhs>0 {r1_checked+=1;}
        }}}
    }}
    println!("R1 OK ({r1_checked} nonzero)");
    // R2: q<0<=p -> (p, q+1, n-1)
    let mut r2c = 0;
    for i in 0..=6u32 { for j in 0..=6u32 { if (i,j)==(0,0) {continue}
        for p in 0i64..=9 { for q in -9i64..0 { for n in 1..=maxn as i64 {
            let lhs = z(&table,i,j,p,q,n); let rhs = z(&table,i,j,p,q+1,n-1);
            assert_eq!(lhs, rhs, "R2 at {:?}", (i,j,p,q,n)); if lhs>0 {r2c+=1;}
        }}}
    }}
    println!("R2 OK ({r2c} nonzero)");
    // R3: p,q>=0, i>=1, j>=1 -> (i-1, j, p+1, q, n-1)
    let mut r3c = 0;
    for i in 1..=6u32 { for j in 1..=6u32 {
        for p in 0i64..=9 { for q in 0i64..=9 { for n in 1..=maxn as i64 {
            let lhs = z(&table,i,j,p,q,n); let rhs = z(&table,i-1,j,p+1,q,n-1);
            assert_eq!(lhs, rhs, "R3 at {:?}", (i,j,p,q,n)); if lhs>0 {r3c+=1;}
        }}}
    }}
    println!("R3 OK ({r3c} nonzero)");
    // R4: p,q>=0, i>=2, j=0 -> (i-1, 0, p+1, q, n-1)
    let mut r4c = 0;
    for i in 2..=6u32 {
        for p in 0i64..=9 { for q in 0i64..=9 { for n in 1..=maxn as i64 {
            let lhs = z(&table,i,0,p,q,n); let rhs = z(&table,i-1,0,p+1,q,n-1);
            assert_eq!(lhs, rhs, "R4 at {:?}", (i,0,p,q,n)); if lhs>0 {r4c+=1;}
        }}}
    }
    println!("R4 OK ({r4c} nonzero)");
    // R5/R6 empirical image: apply lambda to each member of Z_{1,0,p,q,n}, classify
    for q in 0i64..=3 { for p in q..=5 { for n in 1..=maxn as i64 {
        let members = table.get(&SliceCoords{i:1,j:0,p,q,n:n as u64});
        let Some(members) = members else { continue };
        if members.is_empty() { continue }
        let mut img: HashMap<String, usize> = HashMap::new();
        for f in members.iter() {
            // lambda(f) = x_{p+1}^{-1} f = x0^{-p} x1^{-1} x0^{p} f
            let mut g = f.clone();
            for _ in 0..p { g = g.act_x0(); }
            g = g.act_x1_inv();
            for _ in 0..p { g = g.act_x0_inv(); }
            let tag = match classify(&g) {
                None => format!("x0power(len={})", length(&g)),
                Some(c) => format!("Z({},{},{},{};{})", c.i, c.j, c.p, c.q, c.n),
            };
            *img.entry(tag).or_default() += 1;
        }
        let mut v: Vec<_> = img.into_iter().collect();
        v.sort();
        println!("lambda[Z(1,0,{p},{q};{n})] (|Z|={}): {:?}", members.len(), v);
    }}}
}
