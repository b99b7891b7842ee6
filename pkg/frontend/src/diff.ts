// Client-side unified diff between the incorrect and repaired code, computed
// from the two texts the API returns. Standard LCS line diff with 3 lines of
// context, matching the usual `diff -u` framing.

interface Edit {
  kind: " " | "-" | "+";
  line: string;
}

function splitLines(text: string): string[] {
  const lines = text.split("\n");
  if (lines[lines.length - 1] === "") {
    lines.pop();
  }
  return lines;
}

function editScript(a: string[], b: string[]): Edit[] {
  const n = a.length;
  const m = b.length;
  // LCS length table
  const lcs: number[][] = Array.from({ length: n + 1 }, () => new Array(m + 1).fill(0));
  for (let i = n - 1; i >= 0; i--) {
    for (let j = m - 1; j >= 0; j--) {
      lcs[i][j] = a[i] === b[j] ? lcs[i + 1][j + 1] + 1 : Math.max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  const edits: Edit[] = [];
  let i = 0;
  let j = 0;
  while (i < n && j < m) {
    if (a[i] === b[j]) {
      edits.push({ kind: " ", line: a[i] });
      i++;
      j++;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      edits.push({ kind: "-", line: a[i] });
      i++;
    } else {
      edits.push({ kind: "+", line: b[j] });
      j++;
    }
  }
  for (; i < n; i++) edits.push({ kind: "-", line: a[i] });
  for (; j < m; j++) edits.push({ kind: "+", line: b[j] });
  return edits;
}

export function unifiedDiff(
  before: string,
  after: string,
  fromFile = "incorrect.cpp",
  toFile = "repaired.cpp",
  context = 3,
): string {
  const edits = editScript(splitLines(before), splitLines(after));
  if (edits.every((e) => e.kind === " ")) {
    return "";
  }

  // group edits into hunks with `context` lines of surrounding equality
  const keep = new Array(edits.length).fill(false);
  edits.forEach((e, idx) => {
    if (e.kind !== " ") {
      for (let k = Math.max(0, idx - context); k <= Math.min(edits.length - 1, idx + context); k++) {
        keep[k] = true;
      }
    }
  });

  const lines: string[] = [`--- ${fromFile}`, `+++ ${toFile}`];
  let aLine = 1;
  let bLine = 1;
  let idx = 0;
  while (idx < edits.length) {
    if (!keep[idx]) {
      if (edits[idx].kind !== "+") aLine++;
      if (edits[idx].kind !== "-") bLine++;
      idx++;
      continue;
    }
    const start = idx;
    while (idx < edits.length && keep[idx]) idx++;
    const hunk = edits.slice(start, idx);
    const aCount = hunk.filter((e) => e.kind !== "+").length;
    const bCount = hunk.filter((e) => e.kind !== "-").length;
    lines.push(`@@ -${aLine},${aCount} +${bLine},${bCount} @@`);
    for (const e of hunk) {
      lines.push(e.kind + e.line);
      if (e.kind !== "+") aLine++;
      if (e.kind !== "-") bLine++;
    }
  }
  return lines.join("\n") + "\n";
}
