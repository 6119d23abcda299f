//! Flood-fill Euler characteristic, independent of the complex machinery.
//!
//! For a 2-D pixel set the Euler characteristic equals the number of
//! foreground connected components minus the number of enclosed holes.
//! Foreground components use 8-connectivity and holes use 4-connectivity,
//! matching the topology of the union of closed pixel squares (diagonally
//! touching pixels are joined through their shared vertex; diagonally
//! touching background gaps are pinched apart by it).

use crate::shape::GridShape;

/// Components minus holes, by breadth-first flood fill.
pub fn euler_number(shape: &GridShape) -> i64 {
    components(shape) as i64 - holes(shape) as i64
}

/// Number of 8-connected foreground components.
pub fn components(shape: &GridShape) -> usize {
    let (w, h) = (shape.width(), shape.height());
    let mut visited = vec![false; w * h];
    let mut count = 0;
    let mut queue = Vec::new();
    for j in 0..h {
        for i in 0..w {
            if !shape.pixel(i, j) || visited[j * w + i] {
                continue;
            }
            count += 1;
            visited[j * w + i] = true;
            queue.push((i, j));
            while let Some((ci, cj)) = queue.pop() {
                for dj in -1i64..=1 {
                    for di in -1i64..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (ni, nj) = (ci as i64 + di, cj as i64 + dj);
                        if ni < 0 || nj < 0 || ni >= w as i64 || nj >= h as i64 {
                            continue;
                        }
                        let (ni, nj) = (ni as usize, nj as usize);
                        if shape.pixel(ni, nj) && !visited[nj * w + ni] {
                            visited[nj * w + ni] = true;
                            queue.push((ni, nj));
                        }
                    }
                }
            }
        }
    }
    count
}

/// Number of 4-connected background components not connected to the
/// border of the grid.
pub fn holes(shape: &GridShape) -> usize {
    let (w, h) = (shape.width(), shape.height());
    let mut visited = vec![false; w * h];
    let mut queue = Vec::new();

    // Flood the outside in from every border background pixel.
    for j in 0..h {
        for i in 0..w {
            let border = i == 0 || j == 0 || i == w - 1 || j == h - 1;
            if border && !shape.pixel(i, j) && !visited[j * w + i] {
                visited[j * w + i] = true;
                queue.push((i, j));
                flood4(shape, &mut visited, &mut queue);
            }
        }
    }

    // Remaining background components are enclosed.
    let mut count = 0;
    for j in 0..h {
        for i in 0..w {
            if !shape.pixel(i, j) && !visited[j * w + i] {
                count += 1;
                visited[j * w + i] = true;
                queue.push((i, j));
                flood4(shape, &mut visited, &mut queue);
            }
        }
    }
    count
}

fn flood4(shape: &GridShape, visited: &mut [bool], queue: &mut Vec<(usize, usize)>) {
    let (w, h) = (shape.width(), shape.height());
    while let Some((ci, cj)) = queue.pop() {
        for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
            let (ni, nj) = (ci as i64 + di, cj as i64 + dj);
            if ni < 0 || nj < 0 || ni >= w as i64 || nj >= h as i64 {
                continue;
            }
            let (ni, nj) = (ni as usize, nj as usize);
            if !shape.pixel(ni, nj) && !visited[nj * w + ni] {
                visited[nj * w + ni] = true;
                queue.push((ni, nj));
            }
        }
    }
}
