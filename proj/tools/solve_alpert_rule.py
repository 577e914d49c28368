import mpmath as mp, numpy as np, sys
mp.mp.dps = 34
m, a = int(sys.argv[1]), int(sys.argv[2])
A = mp.mpf(a)
raw_p = [sum(mp.mpf(k)**j for k in range(1,a)) - mp.zeta(-j) for j in range(m)]
raw_l = [sum(mp.mpf(k)**j*mp.log(k) for k in range(1,a)) + mp.zeta(-j, derivative=1) for j in range(m)]
T = [raw_p[j]/A**(j+1) for j in range(m)] + [(raw_l[j]-mp.log(A)*raw_p[j])/A**(j+1) for j in range(m)]
G = [mp.mpf(1)/(j+1) for j in range(m)] + [-mp.mpf(1)/(j+1)**2 for j in range(m)]
def FJ(x,W,tar,jac=True):
    r=[mp.mpf(0)]*(2*m); M=mp.matrix(2*m,2*m) if jac else None
    for p in range(m):
        lx=mp.log(x[p]); pw=mp.mpf(1); pwm=mp.mpf(0)
        for j in range(m):
            r[j]+=W[p]*pw; r[m+j]+=W[p]*pw*lx
            if jac:
                M[j,p]=W[p]*j*pwm; M[j,m+p]=pw
                M[m+j,p]=W[p]*(j*pwm*lx+pw/x[p]); M[m+j,m+p]=pw*lx
            pwm=pw; pw*=x[p]
    r=mp.matrix([r[i]-tar[i] for i in range(2*m)])
    return r,M
def newton(x,W,tar):
    for it in range(40):
        r,M=FJ(x,W,tar); nr=mp.norm(r)
        if nr<mp.mpf(10)**-28: return x,W,True
        d=mp.lu_solve(M,-r); lam=mp.mpf(1)
        while True:
            xn=[x[p]+lam*d[p] for p in range(m)]; Wn=[W[p]+lam*d[m+p] for p in range(m)]
            if min(xn)>0 and max(xn)<1 and mp.norm(FJ(xn,Wn,tar,False)[0])<nr*(1-lam/4): break
            lam/=2
            if lam<1e-8: return x,W,False
        x,W=xn,Wn
    return x,W,False
u,uw=np.polynomial.legendre.leggauss(m); u=(u+1)/2; uw=uw/2
x=[mp.mpf(v)**2 for v in u]; W=[2*mp.mpf(v)*mp.mpf(w) for v,w in zip(u,uw)]
x,W,ok=newton(x,W,G)
if not ok: print("gauss fail"); sys.exit(1)
t=mp.mpf(0); dt=mp.mpf(1)/16
while t<1:
    tn=min(t+dt,mp.mpf(1))
    xn,Wn,ok=newton(x,W,[(1-tn)*g+tn*s for g,s in zip(G,T)])
    if ok: x,W,t=xn,Wn,tn; dt=min(dt*mp.mpf(1.5),mp.mpf(0.25))
    else:
        dt/=2
        if dt<1e-6:
            print("FAIL m=%d a=%d at t=%s"%(m,a,mp.nstr(t,8))); print([mp.nstr(v*a,6) for v in sorted(x)]); print([mp.nstr(v*a,6) for _,v in sorted(zip(x,W))]); sys.exit(1)
print("OK m=%d a=%d"%(m,a))
for v,w in sorted(zip(x,W)): print(mp.nstr(v*a,25), mp.nstr(w*a,25))
