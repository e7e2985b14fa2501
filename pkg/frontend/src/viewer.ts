// Minimal three.js viewer: per-part colored meshes with drag-orbit and
// wheel zoom. Infeasible designs stay visible (tinted), never hidden.

import * as THREE from "three";
import type { MeshPart } from "./types.js";

const PART_COLORS: Record<string, number> = {
  fuselage: 0x9aa5b1,
  wing1: 0x4a90d9,
  wing2: 0x74b3e8,
  box1: 0xe0923c,
  box2: 0xd9a552,
  box3: 0xc97f2e,
};

export class Viewer {
  private scene = new THREE.Scene();
  private camera: THREE.PerspectiveCamera;
  private renderer: THREE.WebGLRenderer;
  private group = new THREE.Group();
  private theta = 0.9;
  private phi = 1.1;
  private radius = 4.0;
  private target = new THREE.Vector3(0.8, 0, 0);

  constructor(private canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.camera = new THREE.PerspectiveCamera(
      45,
      canvas.clientWidth / Math.max(canvas.clientHeight, 1),
      0.01,
      100,
    );
    this.scene.background = new THREE.Color(0x10141b);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.55));
    const sun = new THREE.DirectionalLight(0xffffff, 1.1);
    sun.position.set(3, 4, 5);
    this.scene.add(sun);
    this.scene.add(this.group);
    this.bindControls();
    this.updateCamera();
  }

  setParts(parts: MeshPart[], feasible: boolean): void {
    this.group.clear();
    for (const part of parts) {
      const geometry = new THREE.BufferGeometry();
      geometry.setAttribute(
        "position",
        new THREE.Float32BufferAttribute(Float32Array.from(part.vertices), 3),
      );
      geometry.setIndex(part.faces);
      geometry.computeVertexNormals();
      const base = PART_COLORS[part.name] ?? 0x888888;
      const color = feasible ? base : blend(base, 0xff3030, 0.35);
      const material = new THREE.MeshStandardMaterial({
        color,
        metalness: 0.1,
        roughness: 0.7,
        side: THREE.DoubleSide,
      });
      this.group.add(new THREE.Mesh(geometry, material));
    }
    this.render();
  }

  private bindControls(): void {
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    this.canvas.addEventListener("pointerdown", (e) => {
      dragging = true;
      lastX = e.clientX;
      lastY = e.clientY;
    });
    window.addEventListener("pointerup", () => (dragging = false));
    window.addEventListener("pointermove", (e) => {
      if (!dragging) return;
      this.theta -= (e.clientX - lastX) * 0.01;
      this.phi = Math.min(2.9, Math.max(0.2, this.phi - (e.clientY - lastY) * 0.01));
      lastX = e.clientX;
      lastY = e.clientY;
      this.updateCamera();
    });
    this.canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      this.radius = Math.min(20, Math.max(0.5, this.radius * (1 + e.deltaY * 0.001)));
      this.updateCamera();
    });
  }

  private updateCamera(): void {
    const x = this.radius * Math.sin(this.phi) * Math.cos(this.theta);
    const y = this.radius * Math.sin(this.phi) * Math.sin(this.theta);
    const z = this.radius * Math.cos(this.phi);
    this.camera.position.set(this.target.x + x, this.target.y + y, this.target.z + z);
    this.camera.up.set(0, 0, 1);
    this.camera.lookAt(this.target);
    this.render();
  }

  render(): void {
    const w = this.canvas.clientWidth;
    const h = Math.max(this.canvas.clientHeight, 1);
    this.camera.aspect = w / h;
    this.camera.updateProjectionMatrix();
    this.renderer.setSize(w, h, false);
    this.renderer.render(this.scene, this.camera);
  }
}

function blend(a: number, b: number, t: number): number {
  const ar = (a >> 16) & 0xff, ag = (a >> 8) & 0xff, ab = a & 0xff;
  const br = (b >> 16) & 0xff, bg = (b >> 8) & 0xff, bb = b & 0xff;
  const r = Math.round(ar + (br - ar) * t);
  const g = Math.round(ag + (bg - ag) * t);
  const bl = Math.round(ab + (bb - ab) * t);
  return (r << 16) | (g << 8) | bl;
}
