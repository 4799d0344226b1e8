use std::collections::HashMap;
use thompson_core::growth::*;
use thompson_core::word::Letter;

fn main() {
    let maxn = 7usize;
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
    let mut table: HashMap<SliceCoords, Vec<ForestDiagram>> = HashMap::new();
    for d in &all {
        if let Some(c) = classify(d) { table.entry(c).or_default().push(d.clone()); }
    }
    // inspect Z(1,1,0,0,2) and the lambda images of its members
    for (c, v) in table.iter().filter(|(c,_)| c.n <= 3 && c.i==1 && c.j==1) {
        println!("Z({},{},{},{};{}) size {}", c.i,c.j,c.p,c.q,c.n, v.len());
        for f in v {
            let p = c.p;
            let mut g = f.clone();
            for _ in 0..p { g = g.act_x0(); }
            g = g.act_x1_inv();
            for _ in 0..p.max(0) { g = g.act_x0_inv(); }
            let tag = match classify(&g) {
                None => format!("x0power(len={})", length(&g)),
                Some(cc) => format!("Z({},{},{},{};{})", cc.i, cc.j, cc.p, cc.q, cc.n),
            };
            println!("  member key={:?} -> {}", String::from_utf8_lossy(&f.key()), tag);
        }
    }
    println!("expected images Z(0,1,p+1,q,n-1): z(0,1,1,0,1) = {}",
        table.get(&SliceCoords{i:0,j:1,p:1,q:0,n:1}).map(|v|v.len()).unwrap_or(0));
}
