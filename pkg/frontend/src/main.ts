// Page wiring. Everything testable lives in the other modules; this file
// only moves data between them and the DOM.

import { BundleError, TrialBundle, idsFromName, loadBundle } from "./bundle.js";
import { MetricsReport, Press, scoreTrial, serializeResponses } from "./score.js";
import { TrialSession, practicePlan } from "./session.js";
import { keyLegend } from "./timeline.js";

const wavInput = document.getElementById("wav-file") as HTMLInputElement;
const timelineInput = document.getElementById("timeline-file") as HTMLInputElement;
const scenarioInput = document.getElementById("scenario-id") as HTMLInputElement;
const conditionInput = document.getElementById("condition-id") as HTMLInputElement;
const loadBtn = document.getElementById("load-btn") as HTMLButtonElement;
const bundleStatus = document.getElementById("bundle-status") as HTMLDivElement;
const legendBox = document.getElementById("legend") as HTMLDivElement;
const practiceBtn = document.getElementById("practice-btn") as HTMLButtonElement;
const startBtn = document.getElementById("start-btn") as HTMLButtonElement;
const pauseBtn = document.getElementById("pause-btn") as HTMLButtonElement;
const stopBtn = document.getElementById("stop-btn") as HTMLButtonElement;
const trialStatus = document.getElementById("trial-status") as HTMLDivElement;
const resultsBox = document.getElementById("results") as HTMLDivElement;
const downloadArea = document.getElementById("download-area") as HTMLDivElement;

let bundle: TrialBundle | null = null;
let audio: HTMLAudioElement | null = null;
let audioUrl: string | null = null;
let session: TrialSession | null = null;
let practicing = false;

function setTrialButtons(loaded: boolean, running: boolean) {
  practiceBtn.disabled = !loaded || running || practicing;
  startBtn.disabled = !loaded || running || practicing;
  pauseBtn.disabled = !running;
  stopBtn.disabled = !running;
}

function showLegend() {
  if (!bundle) return;
  const rows = keyLegend(bundle.timeline)
    .map(
      (r) =>
        `<tr><td class="key">${r.key}</td><td>${r.sources.join(", ")}</td>` +
        `<td>${r.categories.join(" + ")}</td></tr>`,
    )
    .join("");
  legendBox.innerHTML =
    `<table><thead><tr><th>Key</th><th>Sound</th><th>Kind</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`;
}

loadBtn.addEventListener("click", async () => {
  const wavFile = wavInput.files?.[0] ?? null;
  const timelineFile = timelineInput.files?.[0] ?? null;
  const wavBytes = wavFile ? await wavFile.arrayBuffer() : null;
  try {
    bundle = loadBundle({
      wav: wavBytes,
      timelineText: timelineFile ? await timelineFile.text() : null,
      scenarioId: scenarioInput.value || undefined,
      conditionId: conditionInput.value || undefined,
    });
  } catch (err) {
    bundle = null;
    legendBox.innerHTML = "";
    bundleStatus.textContent = err instanceof BundleError ? `Rejected: ${err.message}` : `${err}`;
    bundleStatus.className = "bad";
    setTrialButtons(false, false);
    return;
  }
  if (audioUrl) URL.revokeObjectURL(audioUrl);
  audioUrl = URL.createObjectURL(new Blob([wavBytes as ArrayBuffer], { type: "audio/wav" }));
  audio = new Audio(audioUrl);
  const a = bundle.audio;
  bundleStatus.textContent =
    `Loaded ${bundle.scenarioId} / ${bundle.conditionId}: ${a.duration.toFixed(1)}s, ` +
    `${a.sampleRate} Hz, ${a.channels} ch.`;
  bundleStatus.className = "ok";
  showLegend();
  resultsBox.innerHTML = "";
  downloadArea.innerHTML = "";
  setTrialButtons(true, false);
});

// prefill the id fields from whichever file name carries them
for (const input of [wavInput, timelineInput]) {
  input.addEventListener("change", () => {
    const name = input.files?.[0]?.name;
    if (!name) return;
    const ids = idsFromName(name);
    if (ids.scenarioId && !scenarioInput.value) scenarioInput.value = ids.scenarioId;
    if (ids.conditionId && !conditionInput.value) conditionInput.value = ids.conditionId;
  });
}

function playSegment(player: HTMLAudioElement, start: number, stop: number): Promise<void> {
  return new Promise((resolve, reject) => {
    player.currentTime = start;
    const poll = window.setInterval(() => {
      if (player.currentTime >= stop) {
        window.clearInterval(poll);
        player.pause();
        resolve();
      }
    }, 15);
    player.play().catch((err) => {
      window.clearInterval(poll);
      reject(err);
    });
  });
}

practiceBtn.addEventListener("click", async () => {
  if (!bundle || !audio) return;
  practicing = true;
  setTrialButtons(true, false);
  try {
    for (const item of practicePlan(bundle.timeline)) {
      trialStatus.textContent = `Practice: key ${item.key} = ${item.source} (${item.category})`;
      await playSegment(audio, item.start, item.stop);
      await new Promise((r) => setTimeout(r, 400));
    }
    trialStatus.textContent = "Practice done.";
  } catch {
    trialStatus.textContent = "Playback failed. Check the audio file, then retry.";
  } finally {
    practicing = false;
    setTrialButtons(true, false);
  }
});

function finishTrial() {
  if (!bundle || !session) return;
  if (audio) audio.onended = null;
  session.stop();
  setTrialButtons(true, false);
  const log = session.toLog();
  const report = scoreTrial(bundle.timeline, log);
  trialStatus.textContent = `Trial over: ${log.length} presses, ${session.discarded} discarded.`;
  showReport(report);
  offerDownload(log);
}

startBtn.addEventListener("click", () => {
  if (!bundle || !audio) return;
  resultsBox.innerHTML = "";
  downloadArea.innerHTML = "";
  const player = audio;
  session = new TrialSession(() => player.currentTime);
  player.currentTime = 0;
  player.onended = finishTrial;
  player
    .play()
    .then(() => {
      session?.start();
      trialStatus.textContent = "Running: press 1-4 when you hear the matching sound.";
      setTrialButtons(true, true);
    })
    .catch(() => {
      trialStatus.textContent = "Playback failed to start. Press Start to retry.";
      setTrialButtons(true, false);
    });
});

pauseBtn.addEventListener("click", () => {
  if (!audio || !session) return;
  if (session.isRunning) {
    audio.pause();
    session.pause();
    pauseBtn.textContent = "Resume";
    trialStatus.textContent = "Paused.";
  } else {
    audio
      .play()
      .then(() => {
        session?.start();
        pauseBtn.textContent = "Pause";
        trialStatus.textContent = "Running.";
      })
      .catch(() => {
        trialStatus.textContent = "Playback failed to resume. Press Resume to retry.";
      });
  }
});

stopBtn.addEventListener("click", () => {
  audio?.pause();
  finishTrial();
});

document.addEventListener("keydown", (e) => {
  if (!session || e.repeat) return;
  if (e.target instanceof HTMLInputElement) return; // typing in a field
  const key = Number(e.key);
  if (session.keyDown(key)) {
    trialStatus.textContent = `Running: ${session.pressCount} presses.`;
  }
});

function fmt(x: number | null, digits = 3): string {
  return x === null ? "–" : x.toFixed(digits);
}

function showReport(report: MetricsReport) {
  const perKey = [...report.perKey.entries()]
    .map(
      ([key, m]) =>
        `<tr><td class="key">${key}</td><td>${m.matched}/${m.events}</td>` +
        `<td>${fmt(m.successRate)}</td><td>${fmt(m.meanDelay)} s</td></tr>`,
    )
    .join("");
  resultsBox.innerHTML =
    `<p><strong>Success rate ${fmt(report.successRate)}</strong> ` +
    `(${report.matchedEvents}/${report.totalEvents} events), ` +
    `mean delay ${fmt(report.meanDelay)} s, ` +
    `${report.unmatchedPresses} unmatched and ${report.rejectedPresses} rejected presses.</p>` +
    `<table><thead><tr><th>Key</th><th>Matched</th><th>Rate</th><th>Delay</th></tr></thead>` +
    `<tbody>${perKey}</tbody></table>`;
}

function offerDownload(log: Press[]) {
  const name = `${bundle?.scenarioId ?? "trial"}.${bundle?.conditionId ?? "run"}.responses.json`;
  const blob = new Blob([serializeResponses(log)], { type: "application/json" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = name;
  a.textContent = `Download ${name}`;
  downloadArea.innerHTML = "";
  downloadArea.appendChild(a);
}

setTrialButtons(false, false);
